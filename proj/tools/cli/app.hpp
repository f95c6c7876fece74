#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "carathset/carathset.hpp"
#include "carathset/json_io.hpp"

namespace carathset::cli {

using nlohmann::json;
using json_io::cx;
using json_io::cx_array;

// ---------------------------------------------------------------------------
// Argument parsing helpers. Complex numbers are "re,im" (or just "re").

inline Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const std::string rs = s.substr(0, comma), is = s.substr(comma + 1);
    const double re = std::stod(rs, &used);
    if (used != rs.size()) throw std::invalid_argument(s);
    const double im = std::stod(is, &used);
    if (used != is.size()) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::DomainError, "cannot parse complex number '" + s + "' (expected re,im)");
  }
}

inline std::vector<Complex> parse_complexes(const std::vector<std::string>& v) {
  std::vector<Complex> out;
  for (const auto& s : v) out.push_back(parse_complex(s));
  return out;
}

inline std::vector<Complex> parse_exact(const std::vector<std::string>& v, std::size_t n, const char* what) {
  auto out = parse_complexes(v);
  if (out.size() != n) throw Error(ErrorCode::DomainError, std::string(what) + " needs " + std::to_string(n) + " complex entries");
  return out;
}

inline TriPoint tri(const std::vector<std::string>& v, const char* what) {
  const auto c = parse_exact(v, 3, what);
  return {c[0], c[1], c[2]};
}

inline BiPoint bi(const std::vector<std::string>& v, const char* what) {
  const auto c = parse_exact(v, 2, what);
  return {c[0], c[1]};
}

inline BallPoint ballp(const std::vector<std::string>& v) {
  const auto c = parse_complexes(v);
  BallPoint p(static_cast<Eigen::Index>(c.size()));
  for (std::size_t j = 0; j < c.size(); ++j) p[static_cast<Eigen::Index>(j)] = c[j];
  return p;
}

inline unsigned default_threads() {
  if (const char* env = std::getenv("CARATHSET_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::logic_error&) {
    }
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Output.

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

inline void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, sub] : v.items()) flatten(sub, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

/// A table of rows (array of flat objects) or a single object flattened to one row.
/// Columns listed in `lead` come first; the rest follow in order of appearance.
inline std::string to_csv(const json& doc, const std::vector<std::string>& lead = {}) {
  std::vector<json> rows;
  if (doc.is_array()) {
    for (const auto& r : doc) rows.push_back(r);
  } else {
    rows.push_back(doc);
  }
  std::vector<std::string> header = lead;
  std::vector<std::vector<std::pair<std::string, std::string>>> flat;
  for (const auto& r : rows) {
    flat.emplace_back();
    flatten(r, "", flat.back());
    for (const auto& [k, v] : flat.back())
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
  os << "\r\n";
  for (const auto& f : flat) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string cell;
      for (const auto& [k, v] : f)
        if (k == header[i]) cell = v;
      os << (i ? "," : "") << csv_field(cell);
    }
    os << "\r\n";
  }
  return os.str();
}

struct Outcome {
  json doc;
  int exit_code = 0;
  bool table = false;  // defaults to CSV
  std::vector<std::string> columns{};
};

// ---------------------------------------------------------------------------
// Commands.

struct Options {
  std::string format = "auto";
  Tolerances tol = kDefaultTolerances;
  unsigned threads = 1;
};

inline Outcome lempert_sweep(double a0, double a1, double b0, double b1, int steps, std::uint64_t samples, std::uint64_t seed,
                             bool allow_degenerate, bool timing, unsigned threads) {
  if (steps < 1) throw Error(ErrorCode::DomainError, "steps must be >= 1");
  struct Cell {
    double a, b;
    json row;
    bool failed = false;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double a = steps == 1 ? a0 : a0 + (a1 - a0) * i / (steps - 1);
      const double b = steps == 1 ? b0 : b0 + (b1 - b0) * j / (steps - 1);
      const DomainDab d(a, b);
      if (!d.interesting() && !allow_degenerate)
        throw Error(ErrorCode::ParameterViolation, "grid cell (" + num(a) + ", " + num(b) + ") is outside |a - b| < 1 < a + b; pass --allow-degenerate");
      cells.push_back({a, b, {}, false});
    }
  auto run_cell = [&](Cell& c) {
    const DomainDab d(c.a, c.b);
    json row = {{"a", c.a}, {"b", c.b}};
    if (!d.interesting()) {
      row["status"] = "retract-regime";
      row["samples"] = 0;
      row["passes"] = 0;
      row["failures"] = 0;
      row["worst_c_gap"] = nullptr;
      row["worst_residual"] = nullptr;
      if (timing) row["seconds"] = 0.0;
      c.row = row;
      return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = lempert_verify(d, samples, seed, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.failed = rep.failures > 0;
    row["status"] = c.failed ? "failed" : "ok";
    row["samples"] = rep.samples;
    row["passes"] = rep.passes;
    row["failures"] = rep.failures;
    row["worst_c_gap"] = rep.worst_c_gap;
    row["worst_residual"] = rep.worst_residual;
    if (timing) row["seconds"] = secs;
    c.row = row;
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k)
      pool.emplace_back([&, k] {
        for (std::size_t i = k; i < cells.size(); i += threads) run_cell(cells[i]);
      });
  }
  Outcome out;
  out.table = true;
  out.columns = {"a", "b", "status", "samples", "passes", "failures", "worst_c_gap", "worst_residual"};
  if (timing) out.columns.push_back("seconds");
  out.doc = json::array();
  for (const auto& c : cells) {
    out.doc.push_back(c.row);
    if (c.failed) out.exit_code = 1;
  }
  return out;
}

inline json lens_polyline(const Lens& lens, int points) {
  const auto [c1, c2] = lens_corners(lens);
  json rows = json::array();
  auto push = [&](const char* part, Complex g) { rows.push_back({{"part", part}, {"re", g.real()}, {"im", g.imag()}}); };
  push("corner", c1);
  // unit circle arc inside |a g + 1| < b, from c1 to c2
  const double t1 = std::arg(c1), t2 = std::arg(c2);
  double span = wrap_angle(t2 - t1);
  if (std::abs(lens.a * std::polar(1.0, t1 + span / 2) + 1.0) >= lens.b) span -= 2.0 * kPi;
  for (int k = 1; k < points; ++k) push("unit_arc", std::polar(1.0, t1 + span * k / points));
  push("corner", c2);
  // arc of |g + 1/a| = b/a inside the unit disc, from c2 back to c1
  const Complex c = -1.0 / lens.a;
  const double r = lens.b / lens.a;
  const double s1 = std::arg(c2 - c), s2 = std::arg(c1 - c);
  double span2 = wrap_angle(s2 - s1);
  if (std::abs(c + std::polar(r, s1 + span2 / 2)) >= 1.0) span2 -= 2.0 * kPi;
  for (int k = 1; k < points; ++k) push("second_arc", c + std::polar(r, s1 + span2 * k / points));
  return rows;
}

/// Returns the exit code; output goes to `out`, diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Carathéodory and Lempert invariants of tridisc varieties, D_{a,b}, polydiscs and balls", "carathset"};
  app.require_subcommand(1);
  Options opt;
  opt.threads = default_threads();
  app.add_option("--format", opt.format, "json | csv (default: json, csv for sweep and plotdata)")
      ->check(CLI::IsMember({"auto", "json", "csv"}));
  app.add_option("--tol-boundary", opt.tol.boundary, "strict-inequality tolerance");
  app.add_option("--tol-residual", opt.tol.residual, "residual tolerance");
  app.add_option("--tol-unimodular", opt.tol.unimodular, "unimodularity tolerance");
  app.add_option("--tol-pole", opt.tol.pole, "pole guard");
  app.add_option("--threads", opt.threads, "worker threads (env CARATHSET_THREADS)");
  app.fallthrough();

  std::function<Outcome()> action;
  std::vector<std::string> alpha_s, z_s, w_s, x_s, from_s, point_s, base_s, dir_s;
  std::vector<int> perm{1, 2, 3};
  double a = 0, b = 0, t = 0;
  std::uint64_t samples = 100, seed = 0;
  std::string gamma_s, lambda_s, branch_s = "plus";
  bool alternatives = false;

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "retract / non-retract classification of M_alpha");
  classify_cmd->add_option("--alpha", alpha_s, "three complex numbers")->required()->expected(3);
  classify_cmd->callback([&] {
    action = [&] { return Outcome{json_io::to_json(classify(Alpha(tri(alpha_s, "--alpha")), opt.tol.boundary))}; };
  });

  auto* normalize_cmd = app.add_subcommand("normalize", "normal form M_(a, b, 1) and diagonal rotations");
  normalize_cmd->add_option("--alpha", alpha_s)->required()->expected(3);
  normalize_cmd->callback([&] {
    action = [&] {
      const Alpha al(tri(alpha_s, "--alpha"));
      json doc = json_io::to_json(normalize(al));
      doc["class"] = json_io::to_json(classify(al, opt.tol.boundary));
      return Outcome{doc};
    };
  });

  auto* transport_cmd = app.add_subcommand("transport", "image variety m(M_alpha) = M_beta for m = permutation o (move point to 0)");
  transport_cmd->add_option("--alpha", alpha_s)->required()->expected(3);
  transport_cmd->add_option("--point", point_s, "point of M_alpha sent to 0 (default origin)")->expected(3);
  transport_cmd->add_option("--perm", perm, "1-based slot order: output i takes coordinate perm[i]")->expected(3);
  transport_cmd->add_option("--samples", samples, "points sampled for the residual check")->default_val(200);
  transport_cmd->add_option("--seed", seed)->default_val(0);
  transport_cmd->callback([&] {
    action = [&] {
      const Alpha al(tri(alpha_s, "--alpha"));
      std::array<int, 3> p{};
      for (std::size_t i = 0; i < 3; ++i) {
        if (perm[i] < 1 || perm[i] > 3) throw Error(ErrorCode::DomainError, "--perm entries must be 1, 2, 3");
        p[i] = perm[i] - 1;
      }
      if (p[0] == p[1] || p[1] == p[2] || p[0] == p[2]) throw Error(ErrorCode::DomainError, "--perm must be a permutation");
      TridiscAutomorphism m = TridiscAutomorphism::permutation(p);
      if (!point_s.empty()) {
        const TriPoint pt = tri(point_s, "--point");
        require_in_polydisc(pt, "--point");
        if (std::abs(membership_residual(al, pt)) > opt.tol.residual) throw Error(ErrorCode::NotOnVariety, "--point is not on M_alpha");
        m = m.compose(TridiscAutomorphism::to_origin(pt));
      }
      const Alpha beta = transport(al, m, opt.tol.residual);
      double worst = 0;
      for (std::uint64_t i = 0; i < samples; ++i) {
        CounterRng rng(seed, i);
        if (auto z = sample_on_variety(al, rng)) worst = std::max(worst, std::abs(membership_residual(beta, m(*z))) / beta.max_modulus());
      }
      json doc = {{"beta", cx_array(beta.a)},
                  {"class_alpha", json_io::to_json(classify(al, opt.tol.boundary))},
                  {"class_beta", json_io::to_json(classify(beta, opt.tol.boundary))},
                  {"automorphism", json_io::to_json(m)},
                  {"max_residual", worst},
                  {"samples", samples}};
      return Outcome{doc};
    };
  });

  // distance
  auto* distance_cmd = app.add_subcommand("distance", "Carathéodory distance");
  distance_cmd->require_subcommand(1);
  auto* dist_poly = distance_cmd->add_subcommand("polydisc", "max_j rho(z_j, w_j)");
  dist_poly->add_option("--z", z_s)->required()->expected(1, 64);
  dist_poly->add_option("--w", w_s)->required()->expected(1, 64);
  dist_poly->callback([&] {
    action = [&] {
      const auto z = parse_complexes(z_s), w = parse_complexes(w_s);
      return Outcome{{{"c", c_polydisc(z, w)}}};
    };
  });
  auto* dist_dab = distance_cmd->add_subcommand("dab", "c on D_{a,b} via the three-member universal set");
  dist_dab->add_option("--a", a)->required();
  dist_dab->add_option("--b", b)->required();
  dist_dab->add_option("--z", z_s)->required()->expected(2);
  dist_dab->add_option("--w", w_s)->required()->expected(2);
  dist_dab->callback([&] {
    action = [&] { return Outcome{{{"c", c_dab(DomainDab(a, b), bi(z_s, "--z"), bi(w_s, "--w"))}}}; };
  });
  auto* dist_ball = distance_cmd->add_subcommand("ball", "c* and c = arctanh c* on the unit ball");
  dist_ball->add_option("--z", z_s)->required()->expected(1, 64);
  dist_ball->add_option("--w", w_s)->required()->expected(1, 64);
  dist_ball->callback([&] {
    action = [&] {
      const double cs = c_star_ball(ballp(w_s), ballp(z_s));
      return Outcome{{{"c_star", cs}, {"c", std::atanh(cs)}}};
    };
  });
  auto* dist_m = distance_cmd->add_subcommand("M", "c = l on M_alpha, with the certifying geodesic");
  dist_m->add_option("--alpha", alpha_s)->required()->expected(3);
  dist_m->add_option("--z", z_s)->required()->expected(3);
  dist_m->add_option("--w", w_s)->required()->expected(3);
  dist_m->callback([&] {
    action = [&] {
      const Alpha al(tri(alpha_s, "--alpha"));
      const TriPoint z = tri(z_s, "--z"), w = tri(w_s, "--w");
      require_in_polydisc(z, "z");
      require_in_polydisc(w, "w");
      const double scale = std::max(1.0, al.max_modulus());
      if (std::abs(membership_residual(al, z)) > 1e-9 * scale || std::abs(membership_residual(al, w)) > 1e-9 * scale)
        throw Error(ErrorCode::NotOnVariety, "point is not on M_alpha");
      json doc = {{"c", c_polydisc(z, w)}};
      if (z != w) {
        const auto cert = geodesic_between(al, z, w);
        doc["lempert_upper_bound"] = cert.lempert_value;
        doc["geodesic_residual"] = cert.residual;
      } else {
        doc["lempert_upper_bound"] = 0.0;
        doc["geodesic_residual"] = 0.0;
      }
      return Outcome{doc};
    };
  });

  // geodesic
  auto* geodesic_cmd = app.add_subcommand("geodesic", "complex geodesic of M_(a, b, 1) (or D_{a,b}) through two points");
  geodesic_cmd->add_option("--a", a)->required();
  geodesic_cmd->add_option("--b", b)->required();
  geodesic_cmd->add_option("--z", z_s, "target on M_(a,b,1) (three entries) or in D_{a,b} (two entries)")->required()->expected(2, 3);
  geodesic_cmd->add_option("--from", from_s, "second point (default origin)")->expected(2, 3);
  geodesic_cmd->add_flag("--alternatives", alternatives, "also search the other branch for a preimage");
  geodesic_cmd->callback([&] {
    action = [&] {
      InversionOptions io;
      io.collect_alternatives = alternatives;
      const DomainDab d(a, b);
      auto lift = [&](const std::vector<std::string>& s, const char* what) {
        return s.size() == 2 ? lift_to_M(d, bi(s, what)) : tri(s, what);
      };
      const TriPoint target = lift(z_s, "--z");
      GeodesicCertificate cert;
      if (from_s.empty()) {
        cert = geodesic_through(a, b, target, io);
      } else {
        cert = geodesic_between(d.alpha(), lift(from_s, "--from"), target, io);
      }
      json doc = json_io::to_json(cert);
      doc["tolerances"] = {{"accept", io.accept}, {"variety", io.variety_tol}};
      return Outcome{doc};
    };
  });

  // lens
  auto* lens_cmd = app.add_subcommand("lens", "lens of tangent directions, (omega, eta) solutions, admissible arc");
  lens_cmd->add_option("--a", a)->required();
  lens_cmd->add_option("--b", b)->required();
  lens_cmd->add_option("--gamma1", gamma_s, "lens point");
  lens_cmd->callback([&] {
    action = [&] {
      const Lens lens(a, b);
      json doc = {{"a", a}, {"b", b}, {"nonempty", lens.nonempty()}};
      if (lens.nonempty()) {
        const auto [c1, c2] = lens_corners(lens);
        doc["corners"] = json::array({cx(c1), cx(c2)});
      }
      if (!gamma_s.empty()) {
        const LensPoint p{parse_complex(gamma_s)};
        doc["gamma1"] = cx(p.gamma1);
        doc["gamma2"] = cx(p.gamma2(lens));
        doc["contains"] = lens_contains(lens, p);
        const auto ll = link_lengths(lens, p);
        doc["r1"] = ll.r1;
        doc["r2"] = ll.r2;
        doc["q"] = cx(ll.q);
        doc["lower_gap"] = ll.lower_gap();
        doc["upper_gap"] = ll.upper_gap();
        if (doc["contains"].get<bool>()) {
          json sols = json::array();
          for (const auto& s : solve_omega_eta(lens, p, opt.tol.boundary))
            sols.push_back({{"branch", std::string(to_string(s.branch))}, {"omega", cx(s.omega)}, {"eta", cx(s.eta)}});
          doc["solutions"] = sols;
          doc["admissible_arc"] = json_io::to_json(admissible_arc(lens, p.gamma1));
        }
      }
      return Outcome{doc};
    };
  });

  // verify-lempert
  double tol_gap = 1e-9, tol_geo = 1e-9;
  auto* verify_cmd = app.add_subcommand("verify-lempert", "sampled check of c = l on D_{a,b} through the origin");
  verify_cmd->add_option("--a", a)->required();
  verify_cmd->add_option("--b", b)->required();
  verify_cmd->add_option("--samples", samples)->default_val(100);
  verify_cmd->add_option("--seed", seed)->default_val(0);
  verify_cmd->add_option("--tol-gap", tol_gap, "allowed |c - l|")->default_val(1e-9);
  verify_cmd->add_option("--tol-geodesic", tol_geo, "allowed disc-through-point residual")->default_val(1e-9);
  verify_cmd->callback([&] {
    action = [&] {
      const auto rep = lempert_verify(DomainDab(a, b), samples, seed, opt.threads, tol_gap, tol_geo);
      return Outcome{json_io::to_json(rep), rep.failures > 0 ? 1 : 0};
    };
  });

  auto* convexity_cmd = app.add_subcommand("convexity", "roots of b w^2 - (b^2 + 1 - a^2) w + b");
  convexity_cmd->add_option("--a", a)->required();
  convexity_cmd->add_option("--b", b)->required();
  convexity_cmd->callback([&] {
    action = [&] {
      const DomainDab d(a, b);
      json doc = json_io::to_json(linear_convexity_quadratic(d));
      doc["interesting"] = d.interesting();
      return Outcome{doc};
    };
  });

  // ball
  auto* ball_cmd = app.add_subcommand("ball", "constructions on the Euclidean ball");
  ball_cmd->require_subcommand(1);
  auto* ball_aut = ball_cmd->add_subcommand("automorphism", "Phi_a(z)");
  ball_aut->add_option("--point", point_s, "a")->required()->expected(1, 64);
  ball_aut->add_option("--z", z_s)->required()->expected(1, 64);
  ball_aut->callback([&] {
    action = [&] { return Outcome{{{"value", json_io::ball_json(ball_automorphism(ballp(point_s), ballp(z_s)))}}}; };
  });
  auto* ball_psi = ball_cmd->add_subcommand("psi", "extremal Psi_l for the line base + lambda direction");
  ball_psi->add_option("--base", base_s)->required()->expected(1, 64);
  ball_psi->add_option("--direction", dir_s)->required()->expected(1, 64);
  ball_psi->add_option("--z", z_s, "evaluate Psi_l here")->expected(1, 64);
  ball_psi->callback([&] {
    action = [&] {
      const auto ext = psi_l(ComplexLine(ballp(base_s), ballp(dir_s)));
      json u = json::array();
      for (Eigen::Index r = 0; r < ext.unitary.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < ext.unitary.cols(); ++c) row.push_back(cx(ext.unitary(r, c)));
        u.push_back(row);
      }
      json doc = {{"minimal_point", json_io::ball_json(ext.minimal_point)}, {"unitary", u}};
      if (!z_s.empty()) doc["value"] = cx(ext(ballp(z_s)));
      return Outcome{doc};
    };
  });
  auto* ball_F = ball_cmd->add_subcommand("F", "left inverse F(z1, z2)");
  ball_F->add_option("--z", z_s)->required()->expected(2);
  ball_F->callback([&] {
    action = [&] { return Outcome{{{"value", cx(F_left_inverse(ballp(z_s), opt.tol.pole))}}}; };
  });
  auto* ball_ft = ball_cmd->add_subcommand("ft", "geodesic f_t(lambda)");
  ball_ft->add_option("--t", t)->required();
  ball_ft->add_option("--lambda", lambda_s)->required();
  ball_ft->callback([&] {
    action = [&] { return Outcome{{{"value", json_io::ball_json(f_t_geodesic(t, parse_complex(lambda_s)))}}}; };
  });
  auto* ball_locus = ball_cmd->add_subcommand("locus", "|F| = 1 test on the unit sphere");
  ball_locus->add_option("--z", z_s)->required()->expected(2);
  ball_locus->callback([&] {
    action = [&] {
      const auto r = boundary_modulus_locus(ballp(z_s), opt.tol.boundary, opt.tol.pole);
      return Outcome{{{"on_locus", r.on_locus}, {"im_value", r.im_value}, {"f_defined", r.f_defined},
                      {"f_modulus", r.f_defined ? json(r.f_modulus) : json(nullptr)}}};
    };
  });

  // universal
  auto* universal_cmd = app.add_subcommand("universal", "three-member universal set of D_{a,b}");
  universal_cmd->add_option("--a", a)->required();
  universal_cmd->add_option("--b", b)->required();
  universal_cmd->add_option("--z", z_s)->required()->expected(2);
  universal_cmd->add_option("--w", w_s, "second point: report c")->expected(2);
  universal_cmd->add_option("--x", x_s, "tangent vector: report gamma (and the kappa certificate at the origin)")->expected(2);
  universal_cmd->callback([&] {
    action = [&] {
      const DomainDab d(a, b);
      const auto u = dab_universal_set(d);
      const auto z = parse_exact(z_s, 2, "--z");
      if (!dab_contains(d, {z[0], z[1]})) throw Error(ErrorCode::NotInDomain, "--z is not in D_{a,b}");
      json doc = {{"image", cx_array(universal_embed(u, {z}).images[0])}};
      if (!w_s.empty()) {
        const auto w = parse_exact(w_s, 2, "--w");
        if (!dab_contains(d, {w[0], w[1]})) throw Error(ErrorCode::NotInDomain, "--w is not in D_{a,b}");
        doc["c"] = universal_c(u, z, w);
      }
      if (!x_s.empty()) {
        const auto x = parse_exact(x_s, 2, "--x");
        doc["gamma"] = universal_gamma(u, z, x);
        if (z[0] == 0.0 && z[1] == 0.0 && d.interesting()) doc["kappa"] = json_io::to_json(kappa_dab_certificate(d, {x[0], x[1]}));
      }
      return Outcome{doc};
    };
  });

  // sweep
  std::vector<double> a_range{0.6, 0.95}, b_range{0.6, 0.95};
  int steps = 5;
  bool allow_degenerate = false, timing = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "verify-lempert over an (a, b) grid; one CSV row per cell");
  sweep_cmd->add_option("--a-range", a_range)->expected(2);
  sweep_cmd->add_option("--b-range", b_range)->expected(2);
  sweep_cmd->add_option("--steps", steps, "grid points per axis")->default_val(5);
  sweep_cmd->add_option("--samples", samples)->default_val(50);
  sweep_cmd->add_option("--seed", seed)->default_val(0);
  sweep_cmd->add_flag("--allow-degenerate", allow_degenerate, "mark cells outside |a - b| < 1 < a + b instead of failing");
  sweep_cmd->add_flag("--timing", timing, "add a seconds column (breaks byte-identical output)");
  sweep_cmd->callback([&] {
    action = [&] {
      return lempert_sweep(a_range[0], a_range[1], b_range[0], b_range[1], steps, samples, seed, allow_degenerate, timing, opt.threads);
    };
  });

  // plotdata
  int points = 64;
  double phase = 0;
  auto* plot_cmd = app.add_subcommand("plotdata", "CSV point clouds for external plotting");
  plot_cmd->require_subcommand(1);
  auto* plot_lens = plot_cmd->add_subcommand("lens", "boundary polyline of the lens");
  plot_lens->add_option("--a", a)->required();
  plot_lens->add_option("--b", b)->required();
  plot_lens->add_option("--points", points, "samples per arc")->default_val(64);
  plot_lens->callback([&] {
    action = [&] {
      if (points < 2) throw Error(ErrorCode::DomainError, "--points must be >= 2");
      return Outcome{lens_polyline(Lens(a, b), points), 0, true, {"part", "re", "im"}};
    };
  });
  auto* plot_arc = plot_cmd->add_subcommand("arc", "admissible omega on the circle for a lens point");
  plot_arc->add_option("--a", a)->required();
  plot_arc->add_option("--b", b)->required();
  plot_arc->add_option("--gamma1", gamma_s)->required();
  plot_arc->add_option("--points", points)->default_val(360);
  plot_arc->callback([&] {
    action = [&] {
      const Lens lens(a, b);
      const Complex g = parse_complex(gamma_s);
      if (points < 1) throw Error(ErrorCode::DomainError, "--points must be >= 1");
      const ArcSet arcs = admissible_arc(lens, g);
      json rows = json::array();
      for (int k = 0; k < points; ++k) {
        const double th = 2.0 * kPi * k / points;
        const Complex om = std::polar(1.0, th);
        rows.push_back({{"theta", th}, {"re", om.real()}, {"im", om.imag()}, {"slack", admissibility_slack(lens, g, om)},
                        {"admissible", arcs.contains(th)}});
      }
      return Outcome{rows, 0, true, {"theta", "re", "im", "slack", "admissible"}};
    };
  });
  auto* plot_ind = plot_cmd->add_subcommand("indicatrix", "radial profile of {X : kappa(0; X) < 1} in a real slice");
  plot_ind->add_option("--a", a)->required();
  plot_ind->add_option("--b", b)->required();
  plot_ind->add_option("--directions", points)->default_val(360);
  plot_ind->add_option("--phase", phase, "X2 carries the factor e^{i phase}")->default_val(0.0);
  plot_ind->callback([&] {
    action = [&] {
      const DomainDab d(a, b);
      if (points < 1) throw Error(ErrorCode::DomainError, "--directions must be >= 1");
      json rows = json::array();
      for (int k = 0; k < points; ++k) {
        const double phi = 2.0 * kPi * k / points;
        const BiPoint dir{std::cos(phi), std::sin(phi) * std::polar(1.0, phase)};
        const double r = 1.0 / kappa_dab_origin(d, dir);
        rows.push_back({{"phi", phi}, {"radius", r}, {"x1", r * std::cos(phi)}, {"x2", r * std::sin(phi)}});
      }
      return Outcome{rows, 0, true, {"phi", "radius", "x1", "x2"}};
    };
  });
  auto* plot_locus = plot_cmd->add_subcommand("locus", "unit-sphere grid flagged by the sign of Im(z2 (1 - conj z1))");
  plot_locus->add_option("--grid", points, "points per angle (rows = grid^3)")->default_val(12);
  plot_locus->callback([&] {
    action = [&] {
      if (points < 1) throw Error(ErrorCode::DomainError, "--grid must be >= 1");
      json rows = json::array();
      for (int i = 0; i <= points; ++i)
        for (int j = 0; j < points; ++j)
          for (int k = 0; k < points; ++k) {
            const double s = 0.5 * kPi * i / points;
            const Complex z1 = std::polar(std::cos(s), 2.0 * kPi * j / points), z2 = std::polar(std::sin(s), 2.0 * kPi * k / points);
            json row = {{"z1_re", z1.real()}, {"z1_im", z1.imag()}, {"z2_re", z2.real()}, {"z2_im", z2.imag()}};
            const auto r = boundary_modulus_locus(ball_point({z1, z2}), opt.tol.boundary, opt.tol.pole);
            row["im_value"] = r.im_value;
            row["sign"] = r.on_locus ? 0 : (r.im_value > 0 ? 1 : -1);
            row["f_modulus"] = r.f_defined ? json(r.f_modulus) : json(nullptr);
            row["status"] = !r.f_defined ? "indeterminate" : (r.on_locus ? "locus" : "interior");
            rows.push_back(row);
          }
      return Outcome{rows, 0, true, {"z1_re", "z1_im", "z2_re", "z2_im", "im_value", "sign", "f_modulus", "status"}};
    };
  });

  // Parse.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    out << json_io::error_json(ErrorCode::DomainError, e.what()).dump() << "\n";
    return 2;
  }

  // Run.
  Outcome res;
  try {
    if (!action) throw Error(ErrorCode::DomainError, "no command");
    res = action();
  } catch (const Error& e) {
    err << e.what() << "\n";
    out << json_io::error_json(e.code(), e.what()).dump() << "\n";
    return is_validation_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    out << json_io::error_json(ErrorCode::DomainError, e.what()).dump() << "\n";
    return 2;
  }

  const bool csv = opt.format == "csv" || (opt.format == "auto" && res.table);
  if (csv) {
    out << to_csv(res.doc, res.columns);
  } else {
    out << res.doc.dump() << "\n";
  }
  return res.exit_code;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace carathset::cli
