#pragma once

#include <json.hpp>
#include <string>

#include "carathset/ball.hpp"
#include "carathset/core.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/geodesics.hpp"
#include "carathset/metrics.hpp"
#include "carathset/varieties.hpp"

// Complex numbers are [re, im]. Quadratics are [A, B, C0] for A x^2 + B x + C0.

namespace carathset::json_io {

using nlohmann::json;

inline json cx(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex to_cx(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::DomainError, "complex number must be [re, im]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

template <class Seq>
json cx_array(const Seq& v) {
  json out = json::array();
  for (const Complex& z : v) out.push_back(cx(z));
  return out;
}

inline json to_json(const Alpha& a) { return {{"alpha", cx_array(a.a)}}; }

inline Alpha alpha_from_json(const json& j) {
  const auto& arr = j.at("alpha");
  if (arr.size() != 3) throw Error(ErrorCode::DomainError, "alpha needs three entries");
  return Alpha{to_cx(arr[0]), to_cx(arr[1]), to_cx(arr[2])};
}

inline json to_json(const TriClass& c) {
  if (!c.retract) return {{"class", "NonRetract"}};
  return {{"class", "RetractGraph"}, {"axis", c.axis}};
}

inline json to_json(const NormalForm& nf) { return {{"a", nf.a}, {"b", nf.b}, {"rotations", cx_array(nf.rotations)}}; }

inline json to_json(const MobiusMap& m) { return {{"nu", cx(m.nu())}, {"rotation", cx(m.rotation())}}; }

inline MobiusMap mobius_from_json(const json& j) { return MobiusMap(to_cx(j.at("nu")), to_cx(j.at("rotation"))); }

inline json to_json(const TridiscAutomorphism& m) {
  json maps = json::array();
  for (const auto& f : m.maps) maps.push_back(to_json(f));
  return {{"perm", m.perm}, {"maps", maps}};
}

inline TridiscAutomorphism automorphism_from_json(const json& j) {
  TridiscAutomorphism m;
  m.perm = j.at("perm").get<std::array<int, 3>>();
  for (std::size_t i = 0; i < 3; ++i) m.maps[i] = mobius_from_json(j.at("maps").at(i));
  return m;
}

inline json to_json(const Quadratic& q) { return json::array({cx(q.a), cx(q.b), cx(q.c0)}); }

inline Quadratic quadratic_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::DomainError, "quadratic must be [A, B, C0]");
  return {to_cx(j[0]), to_cx(j[1]), to_cx(j[2])};
}

inline json to_json(const AnalyticDisc& d) {
  json comps = json::array();
  for (const auto& c : d.components) comps.push_back({{"num", to_json(c.num)}, {"den", to_json(c.den)}, {"lambda_power", c.lambda_power}});
  json params = json::object();
  for (const auto& [k, v] : d.params) params[k] = cx(v);
  json out = {{"components", comps}, {"tag", std::string(to_string(d.tag))}, {"params", params}};
  if (d.post) out["post"] = to_json(*d.post);
  return out;
}

inline DiscTag tag_from_string(const std::string& s) {
  for (DiscTag t : {DiscTag::PhiGamma, DiscTag::BlaschkeFamily, DiscTag::Balanced, DiscTag::Flat})
    if (to_string(t) == s) return t;
  throw Error(ErrorCode::DomainError, "unknown disc tag " + s);
}

inline AnalyticDisc disc_from_json(const json& j) {
  AnalyticDisc d;
  for (const auto& c : j.at("components"))
    d.components.push_back({c.value("lambda_power", 0), quadratic_from_json(c.at("num")), quadratic_from_json(c.at("den"))});
  d.tag = tag_from_string(j.at("tag").get<std::string>());
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) d.params[k] = to_cx(v);
  if (j.contains("post") && !j.at("post").is_null()) d.post = automorphism_from_json(j.at("post"));
  return d;
}

inline json to_json(const GeodesicCertificate& c) {
  json alts = json::array();
  for (const auto& s : c.alternatives)
    alts.push_back({{"gamma1", cx(s.gamma.gamma1)}, {"branch", std::string(to_string(s.branch))}, {"residual", s.residual}});
  return {{"disc", to_json(c.disc)},
          {"param_at_target", cx(c.param_at_target)},
          {"residual", c.residual},
          {"caratheodory_value", c.caratheodory_value},
          {"lempert_value", c.lempert_value},
          {"gamma1", cx(c.gamma.gamma1)},
          {"branch", std::string(to_string(c.branch))},
          {"slot_order", json::array({c.perm[0] + 1, c.perm[1] + 1, c.perm[2] + 1})},
          {"alternatives", alts}};
}

inline json to_json(const LempertReport& r) {
  json failed = json::array();
  for (const auto& s : r.failed) {
    json f = {{"index", s.index}, {"w", cx_array(s.w)}, {"c_gap", s.c_gap}, {"residual", s.residual}};
    if (!s.error.empty()) f["error"] = s.error;
    failed.push_back(f);
  }
  return {{"a", r.a},
          {"b", r.b},
          {"seed", r.seed},
          {"samples", r.samples},
          {"passes", r.passes},
          {"failures", r.failures},
          {"worst_c_gap", r.worst_c_gap},
          {"worst_residual", r.worst_residual},
          {"dominant_counts", r.dominant_counts},
          {"tolerances", {{"c_gap", r.tol_c_gap}, {"residual", r.tol_residual}}},
          {"failed_samples", failed}};
}

inline json to_json(const ConvexityQuadratic& q) {
  return {{"root1", cx(q.root1)}, {"root2", cx(q.root2)}, {"all_unimodular", q.all_unimodular}};
}

inline json to_json(const ArcSet& s) {
  json arcs = json::array();
  for (const auto& [start, length] : s.arcs) arcs.push_back({{"start", start}, {"length", length}});
  return arcs;
}

inline json to_json(const KappaCertificate& k) {
  return {{"formula", k.formula}, {"upper_bound", k.upper_bound}, {"lower_bound", k.lower_bound},
          {"derivative_residual", k.derivative_residual}, {"disc", to_json(k.disc)}};
}

inline json to_json(const Tolerances& t) {
  return {{"boundary", t.boundary}, {"residual", t.residual}, {"unimodular", t.unimodular}, {"pole", t.pole}};
}

inline json error_json(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

inline json ball_json(const BallPoint& p) {
  json out = json::array();
  for (Eigen::Index j = 0; j < p.size(); ++j) out.push_back(cx(p[j]));
  return out;
}

}  // namespace carathset::json_io
