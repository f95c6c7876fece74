#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "carathset/core.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/random.hpp"

namespace carathset {

using TriPoint = std::array<Complex, 3>;
using BiPoint = std::array<Complex, 2>;

inline void require_in_polydisc(const TriPoint& z, std::string_view what) {
  for (const auto& c : z) require_in_disc(c, what);
}

inline double max_modulus(const TriPoint& z) {
  return std::max({std::abs(z[0]), std::abs(z[1]), std::abs(z[2])});
}

/// Coefficient triple of the variety
///   a1 z1 + a2 z2 + a3 z3 = conj(a3) z1 z2 + conj(a2) z1 z3 + conj(a1) z2 z3.
struct Alpha {
  std::array<Complex, 3> a{};

  Alpha() = default;
  Alpha(Complex a1, Complex a2, Complex a3) : a{a1, a2, a3} {
    for (const auto& c : a) require_finite(c, "alpha");
    if (a1 == 0.0 && a2 == 0.0 && a3 == 0.0) throw Error(ErrorCode::DomainError, "alpha must not be the zero triple");
  }
  explicit Alpha(const std::array<Complex, 3>& t) : Alpha(t[0], t[1], t[2]) {}

  Complex operator[](std::size_t i) const { return a[i]; }

  double max_modulus() const { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

  // alpha' with alpha'_i = alpha_{perm[i]}; the variety for alpha' is the
  // image of M_alpha under z -> (z_{perm[0]}, z_{perm[1]}, z_{perm[2]}).
  Alpha permuted(const std::array<int, 3>& perm) const { return {a[perm[0]], a[perm[1]], a[perm[2]]}; }
};

/// LHS minus RHS of the defining equation; zero exactly on M_alpha.
inline Complex membership_residual(const Alpha& alpha, const TriPoint& z) {
  const auto& [a1, a2, a3] = alpha.a;
  return (a1 * z[0] + a2 * z[1] + a3 * z[2]) -
         (std::conj(a3) * z[0] * z[1] + std::conj(a2) * z[0] * z[2] + std::conj(a1) * z[1] * z[2]);
}

/// z3 as a function of (z1, z2) on M_alpha; requires alpha3 != 0.
inline Complex graph_value(const Alpha& alpha, Complex z1, Complex z2, double pole_tol = kDefaultTolerances.pole) {
  const auto& [a1, a2, a3] = alpha.a;
  if (a3 == 0.0) throw Error(ErrorCode::Unsupported, "graph form needs alpha3 != 0; permute coordinates first");
  const Complex a = a1 / std::conj(a3);
  const Complex b = a2 / std::conj(a3);
  const Complex omega = std::conj(a3) / a3;
  const Complex den = std::conj(b) * z1 + std::conj(a) * z2 - 1.0;
  if (std::abs(den) < pole_tol) throw Error(ErrorCode::PoleError, "graph denominator vanishes");
  return omega * (a * z1 + b * z2 - z1 * z2) / den;
}

struct TriClass {
  bool retract = false;
  int axis = 0;  // 1-based coordinate over whose complement M_alpha is a graph; 0 when not a retract

  static TriClass non_retract() { return {false, 0}; }
  static TriClass retract_graph(int axis) { return {true, axis}; }

  friend bool operator==(const TriClass&, const TriClass&) = default;
};

/// Retract iff some |alpha_i| + |alpha_j| <= |alpha_k| (ties count as retract).
/// The comparison is made relative to max |alpha_i| so it is scale invariant.
inline TriClass classify(const Alpha& alpha, double tol = kDefaultTolerances.boundary) {
  const double s = alpha.max_modulus();
  const std::array<double, 3> m{std::abs(alpha[0]) / s, std::abs(alpha[1]) / s, std::abs(alpha[2]) / s};
  for (int k = 0; k < 3; ++k) {
    const double others = m[static_cast<std::size_t>((k + 1) % 3)] + m[static_cast<std::size_t>((k + 2) % 3)];
    if (others - m[static_cast<std::size_t>(k)] <= tol) return TriClass::retract_graph(k + 1);
  }
  return TriClass::non_retract();
}

/// Normalised form: w = (u1 z1, u2 z2, u3 z3) maps M_alpha onto
/// w3 = (a w1 + b w2 - w1 w2) / (b w1 + a w2 - 1) with a, b >= 0.
struct NormalForm {
  double a = 0;
  double b = 0;
  std::array<Complex, 3> rotations{1.0, 1.0, 1.0};

  TriPoint apply(const TriPoint& z) const {
    return {rotations[0] * z[0], rotations[1] * z[1], rotations[2] * z[2]};
  }
  TriPoint unapply(const TriPoint& w) const {
    return {std::conj(rotations[0]) * w[0], std::conj(rotations[1]) * w[1], std::conj(rotations[2]) * w[2]};
  }

  // The normalised variety written as M_(a, b, 1).
  Alpha alpha() const { return {a, b, 1.0}; }
};

inline NormalForm normalize(const Alpha& alpha) {
  const auto& [a1, a2, a3] = alpha.a;
  if (a3 == 0.0) throw Error(ErrorCode::Unsupported, "normalisation needs alpha3 != 0; permute coordinates first");
  const Complex a = a1 / std::conj(a3);
  const Complex b = a2 / std::conj(a3);
  const Complex omega = std::conj(a3) / a3;
  auto phase = [](Complex c) { return c == 0.0 ? Complex(1.0) : c / std::abs(c); };
  NormalForm nf;
  nf.a = std::abs(a);
  nf.b = std::abs(b);
  const Complex u1 = std::conj(phase(b));
  const Complex u2 = std::conj(phase(a));
  nf.rotations = {u1, u2, std::conj(omega) * u1 * u2};
  return nf;
}

/// Automorphism of the tridisc: m(z)_i = maps[i](z[perm[i]]).
struct TridiscAutomorphism {
  std::array<int, 3> perm{0, 1, 2};
  std::array<MobiusMap, 3> maps{};

  static TridiscAutomorphism identity() { return {}; }

  static TridiscAutomorphism permutation(const std::array<int, 3>& p) {
    TridiscAutomorphism m;
    m.perm = p;
    return m;
  }

  static TridiscAutomorphism rotations(const std::array<Complex, 3>& u) {
    TridiscAutomorphism m;
    for (std::size_t i = 0; i < 3; ++i) m.maps[i] = MobiusMap::multiplication(u[i]);
    return m;
  }

  // Diagonal map sending p to the origin (each coordinate map is an involution).
  static TridiscAutomorphism to_origin(const TriPoint& p) {
    TridiscAutomorphism m;
    for (std::size_t i = 0; i < 3; ++i) m.maps[i] = MobiusMap(p[i], 1.0);
    return m;
  }

  TriPoint operator()(const TriPoint& z) const {
    TriPoint w{};
    for (std::size_t i = 0; i < 3; ++i) w[i] = maps[i](z[static_cast<std::size_t>(perm[i])]);
    return w;
  }

  TridiscAutomorphism inverse() const {
    TridiscAutomorphism inv;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto j = static_cast<std::size_t>(perm[i]);
      inv.perm[j] = static_cast<int>(i);
      inv.maps[j] = maps[i].inverse();
    }
    return inv;
  }

  /// (*this) o inner.
  TridiscAutomorphism compose(const TridiscAutomorphism& inner) const {
    TridiscAutomorphism out;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto k = static_cast<std::size_t>(perm[i]);
      out.perm[i] = inner.perm[k];
      out.maps[i] = maps[i].compose(inner.maps[k]);
    }
    return out;
  }

  bool is_identity(double tol = 1e-15) const {
    for (std::size_t i = 0; i < 3; ++i) {
      if (perm[i] != static_cast<int>(i)) return false;
      if (std::abs(maps[i].nu()) > tol || std::abs(maps[i].rotation() + 1.0) > tol) return false;
    }
    return true;
  }
};

namespace detail {

// Swap coordinates i and j of a diagonal automorphism / triple.
inline void swap_coords(std::array<MobiusMap, 3>& maps, Alpha& alpha, int i, int j) {
  std::swap(maps[static_cast<std::size_t>(i)], maps[static_cast<std::size_t>(j)]);
  std::swap(alpha.a[static_cast<std::size_t>(i)], alpha.a[static_cast<std::size_t>(j)]);
}

// Image of M_alpha (alpha3 != 0) under the diagonal map (maps[0], maps[1], maps[2]),
// which must send a point of M_alpha to the origin.
inline Alpha transport_diagonal(const Alpha& alpha, const std::array<MobiusMap, 3>& maps) {
  // Generic sample points of the image coordinates.
  static constexpr std::array<std::pair<double, double>, 12> kProbe{{
      {0.31, 0.17}, {-0.23, 0.41}, {0.12, -0.37}, {-0.44, -0.08}, {0.05, 0.29}, {0.38, -0.21},
      {-0.19, -0.33}, {0.27, 0.36}, {-0.35, 0.14}, {0.16, 0.02}, {-0.07, -0.45}, {0.43, 0.09},
  }};
  const MobiusMap inv0 = maps[0].inverse(), inv1 = maps[1].inverse();

  // phi (D w1 + E w2 + 1) = A w1 + B w2 + C w1 w2, unknowns (A, B, C, D, E).
  Eigen::MatrixXcd m(6, 5);
  Eigen::VectorXcd rhs(6);
  int row = 0;
  for (std::size_t k = 0; row < 6 && k + 1 < kProbe.size(); k += 2) {
    const Complex w1(kProbe[k].first, kProbe[k].second);
    const Complex w2(kProbe[k + 1].first, kProbe[k + 1].second);
    Complex phi;
    try {
      const Complex z3 = graph_value(alpha, inv0(w1), inv1(w2), 1e-8);
      phi = maps[2](z3);
    } catch (const Error&) {
      continue;
    }
    if (!is_finite(phi) || std::abs(phi) > 1e6) continue;
    m(row, 0) = w1;
    m(row, 1) = w2;
    m(row, 2) = w1 * w2;
    m(row, 3) = -phi * w1;
    m(row, 4) = -phi * w2;
    rhs(row) = phi;
    ++row;
  }
  if (row < 6) throw Error(ErrorCode::DegenerateImage, "could not sample the transported graph");
  const Eigen::VectorXcd x = m.colPivHouseholderQr().solve(rhs);
  const double fit = (m * x - rhs).norm();
  if (!(fit < 1e-8 * (1.0 + rhs.norm()))) throw Error(ErrorCode::DegenerateImage, "transported graph is not of the expected rational form");

  const Complex A = x(0), B = x(1), C = x(2), D = x(3), E = x(4);
  if (std::abs(std::abs(C) - 1.0) > 1e-7) {
    // Only the flat graphs z3 = A z1 or z3 = B z2 can arise here.
    throw Error(ErrorCode::DegenerateImage, "image is a flat graph z3 = c z_j (A=" + std::to_string(std::abs(A)) +
                                                ", B=" + std::to_string(std::abs(B)) + ")");
  }
  // c^2 = C, branch with nonnegative real part (positive imaginary part on ties).
  Complex c = std::sqrt(C);
  if (c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0)) c = -c;
  return {c * std::conj(E), c * std::conj(D), -std::conj(c)};
}

}  // namespace detail

/// beta with m(M_alpha) = M_beta. m must send some point of M_alpha to 0.
inline Alpha transport(const Alpha& alpha, const TridiscAutomorphism& m, double tol = 1e-10) {
  const TriPoint base = m.inverse()(TriPoint{0.0, 0.0, 0.0});
  if (std::abs(membership_residual(alpha, base)) > tol * std::max(1.0, alpha.max_modulus()))
    throw Error(ErrorCode::InvalidAutomorphism, "automorphism does not send a point of M_alpha to the origin");

  Alpha permuted = alpha.permuted(m.perm);
  std::array<MobiusMap, 3> maps = m.maps;
  int axis = 2;
  if (permuted[2] == 0.0) axis = std::abs(permuted[0]) >= std::abs(permuted[1]) ? 0 : 1;
  if (axis != 2) detail::swap_coords(maps, permuted, axis, 2);
  Alpha beta = detail::transport_diagonal(permuted, maps);
  if (axis != 2) std::swap(beta.a[static_cast<std::size_t>(axis)], beta.a[2]);
  return beta;
}

/// Rejection sample of a point of M_alpha inside the tridisc, drawn as a
/// graph over the two coordinates complementary to the largest |alpha_k|.
inline std::optional<TriPoint> sample_on_variety(const Alpha& alpha, CounterRng& rng, int max_tries = 10000) {
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(alpha[static_cast<std::size_t>(k)]) > std::abs(alpha[static_cast<std::size_t>(axis)])) axis = k;
  std::array<int, 3> perm{0, 1, 2};
  std::swap(perm[static_cast<std::size_t>(axis)], perm[2]);
  const Alpha p = alpha.permuted(perm);
  for (int t = 0; t < max_tries; ++t) {
    const Complex z1 = rng.in_disc(), z2 = rng.in_disc();
    Complex z3;
    try {
      z3 = graph_value(p, z1, z2, 1e-6);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(z3) >= 1.0 - 1e-9) continue;
    TriPoint w{z1, z2, z3};
    std::swap(w[static_cast<std::size_t>(axis)], w[2]);
    return w;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Planar-pair domains D_{a,b} = { z in D^2 : |F_{a,b}(z)| < 1 }.

struct DomainDab {
  double a = 0;
  double b = 0;

  DomainDab() = default;
  DomainDab(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0 && b > 0) || !std::isfinite(a) || !std::isfinite(b))
      throw Error(ErrorCode::ParameterViolation, "D_{a,b} needs a, b > 0");
  }

  // {a, b, 1} satisfies the strict triangle inequalities.
  bool interesting() const { return std::abs(a - b) < 1.0 && 1.0 < a + b; }

  Alpha alpha() const { return {a, b, 1.0}; }
};

/// F_{a,b}(z) = (a z1 + b z2 - z1 z2) / (b z1 + a z2 - 1).
inline Complex dab_function(const DomainDab& d, const BiPoint& z, double pole_tol = kDefaultTolerances.pole) {
  const Complex den = d.b * z[0] + d.a * z[1] - 1.0;
  if (std::abs(den) < pole_tol) throw Error(ErrorCode::PoleError, "F_{a,b} denominator vanishes");
  return (d.a * z[0] + d.b * z[1] - z[0] * z[1]) / den;
}

/// Gradient (dF/dz1, dF/dz2).
inline BiPoint dab_function_gradient(const DomainDab& d, const BiPoint& z) {
  const Complex num = d.a * z[0] + d.b * z[1] - z[0] * z[1];
  const Complex den = d.b * z[0] + d.a * z[1] - 1.0;
  const Complex den2 = den * den;
  return {((d.a - z[1]) * den - num * d.b) / den2, ((d.b - z[0]) * den - num * d.a) / den2};
}

inline bool dab_contains(const DomainDab& d, const BiPoint& z) {
  if (!is_finite(z[0]) || !is_finite(z[1])) return false;
  if (std::abs(z[0]) >= 1.0 || std::abs(z[1]) >= 1.0) return false;
  const Complex num = d.a * z[0] + d.b * z[1] - z[0] * z[1];
  const Complex den = d.b * z[0] + d.a * z[1] - 1.0;
  return std::abs(num) < std::abs(den);
}

inline TriPoint lift_to_M(const DomainDab& d, const BiPoint& z) {
  if (!dab_contains(d, z)) throw Error(ErrorCode::NotInDomain, "point is not in D_{a,b}");
  return {z[0], z[1], dab_function(d, z)};
}

}  // namespace carathset
