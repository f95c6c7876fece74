#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "carathset/core.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/metrics.hpp"

namespace carathset {

using BallPoint = Eigen::VectorXcd;

// <z, a> = sum z_j conj(a_j)
inline Complex ball_inner(const BallPoint& z, const BallPoint& a) { return a.dot(z); }

inline void require_in_ball(const BallPoint& z, const char* what) {
  for (Eigen::Index j = 0; j < z.size(); ++j) require_finite(z[j], what);
  if (!(z.squaredNorm() < 1.0)) throw Error(ErrorCode::DomainError, std::string(what) + " is not in the open unit ball");
}

inline BallPoint ball_point(std::initializer_list<Complex> c) {
  BallPoint v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index k = 0;
  for (auto x : c) v[k++] = x;
  return v;
}

/// Involutive automorphism of the ball swapping a and 0; Phi_0 = id.
///
/// Evaluated as (a - P z - s Q z) / (1 - <z, a>) with P the projection onto
/// C a and Q = I - P, which is the displayed formula with |a|^2 cancelled.
inline BallPoint ball_automorphism(const BallPoint& a, const BallPoint& z) {
  require_in_ball(a, "a");
  require_in_ball(z, "z");
  if (a.size() != z.size()) throw Error(ErrorCode::DomainError, "dimension mismatch");
  const double na2 = a.squaredNorm();
  if (na2 == 0.0) return z;
  const Complex za = ball_inner(z, a);
  const BallPoint pz = (za / na2) * a;
  const BallPoint qz = z - pz;
  const double s = std::sqrt(1.0 - na2);
  return (a - pz - s * qz) / (1.0 - za);
}

struct ComplexLine {
  BallPoint base;
  BallPoint direction;  // unit norm

  ComplexLine(BallPoint base_, BallPoint direction_) : base(std::move(base_)), direction(std::move(direction_)) {
    if (base.size() != direction.size() || base.size() == 0) throw Error(ErrorCode::DomainError, "dimension mismatch");
    const double n = direction.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::DomainError, "line direction must be nonzero");
    direction /= n;
  }

  BallPoint at(Complex lambda) const { return base + lambda * direction; }
};

inline BallPoint minimal_norm_point(const ComplexLine& l) {
  const BallPoint foot = l.base - ball_inner(l.base, l.direction) * l.direction;
  if (!(foot.squaredNorm() < 1.0)) throw Error(ErrorCode::NoIntersection, "line misses the open ball");
  return foot;
}

struct BallExtremal {
  BallPoint minimal_point;
  Eigen::MatrixXcd unitary;  // U with U v = e_1, v the direction of Phi_a(l)

  /// Psi_l(z) = (U Phi_a(z))_1
  Complex operator()(const BallPoint& z) const { return (unitary.row(0) * ball_automorphism(minimal_point, z))(0); }
};

inline BallExtremal psi_l(const ComplexLine& l) {
  const BallPoint a = minimal_norm_point(l);
  const auto n = a.size();
  // Phi_a(l) is a line through 0; read its direction off one more point.
  const double t = 0.5 * std::sqrt(1.0 - a.squaredNorm());
  BallPoint v = ball_automorphism(a, (a + t * l.direction).eval());
  v /= v.norm();

  // Gram-Schmidt on v, e_1, ..., e_n.
  std::vector<BallPoint> basis{v};
  for (Eigen::Index k = 0; k < n && static_cast<Eigen::Index>(basis.size()) < n; ++k) {
    BallPoint e = BallPoint::Zero(n);
    e[k] = 1.0;
    for (const auto& u : basis) e -= u.dot(e) * u;
    const double en = e.norm();
    if (en > 1e-8) basis.push_back(e / en);
  }
  Eigen::MatrixXcd u(n, n);
  for (Eigen::Index r = 0; r < n; ++r) u.row(r) = basis[static_cast<std::size_t>(r)].adjoint();
  return {a, u};
}

/// sqrt(1 - |a|^2) (a1 z2 - a2 z1) / (|a| (1 - <z, a>)), a != 0: the coordinate
/// of Phi_a(z) along the unit vector orthogonal to a, i.e. Psi_l for the line
/// through a orthogonal to a. It vanishes on {lambda a}. The version with
/// conj(a1), conj(a2) in the numerator agrees for real a but leaves the disc otherwise.
inline UniversalMember universal_member_B2(Complex a1, Complex a2) {
  const double na2 = std::norm(a1) + std::norm(a2);
  if (!(na2 > 0.0) || !(na2 < 1.0)) throw Error(ErrorCode::ParameterViolation, "need 0 < |a| < 1");
  const double k = std::sqrt(1.0 - na2) / std::sqrt(na2);
  const Complex c1 = std::conj(a1), c2 = std::conj(a2);
  auto value = [=](std::span<const Complex> z) {
    return k * (a1 * z[1] - a2 * z[0]) / (1.0 - c1 * z[0] - c2 * z[1]);
  };
  auto gradient = [=](std::span<const Complex> z) {
    const Complex num = a1 * z[1] - a2 * z[0], den = 1.0 - c1 * z[0] - c2 * z[1];
    const Complex d2 = den * den;
    return std::vector<Complex>{k * (-a2 * den + c1 * num) / d2, k * (a1 * den + c2 * num) / d2};
  };
  return {"ball_b2", value, gradient};
}

/// z -> a1 z1 + a2 z2 with a1 >= 0 and a1^2 + |a2|^2 = 1.
inline UniversalMember universal_member_linear(double a1, Complex a2, double tol = 1e-12) {
  if (a1 < 0.0 || std::abs(a1 * a1 + std::norm(a2) - 1.0) > tol)
    throw Error(ErrorCode::ParameterViolation, "need a1 >= 0 and a1^2 + |a2|^2 = 1");
  return {"ball_linear", [=](std::span<const Complex> z) { return a1 * z[0] + a2 * z[1]; },
          [=](std::span<const Complex>) { return std::vector<Complex>{a1, a2}; }};
}

namespace detail {

struct FParts {
  Complex num, den;
};

inline FParts f_parts(Complex z1, Complex z2) {
  return {2.0 * z1 * (1.0 - z1) - z2 * z2, 2.0 * (1.0 - z1) - z2 * z2};
}

}  // namespace detail

/// F(z) = (2 z1 (1 - z1) - z2^2) / (2 (1 - z1) - z2^2).
inline Complex F_left_inverse(const BallPoint& z, double pole_tol = kDefaultTolerances.pole) {
  if (z.size() != 2) throw Error(ErrorCode::DomainError, "F is defined on the 2-ball");
  require_in_ball(z, "z");
  const auto p = detail::f_parts(z[0], z[1]);
  if (std::abs(p.den) < pole_tol) throw Error(ErrorCode::Indeterminate, "F denominator vanishes");
  return p.num / p.den;
}

/// f_t(lambda) = ((t^2 + lambda) / (1 + t^2), t (lambda - 1) / (1 + t^2)).
inline BallPoint f_t_geodesic(double t, Complex lambda) {
  require_finite(lambda, "lambda");
  const double s = 1.0 + t * t;
  return ball_point({(t * t + lambda) / s, t * (lambda - 1.0) / s});
}

inline double c_star_ball(const BallPoint& w, const BallPoint& z) {
  require_in_ball(w, "w");
  require_in_ball(z, "z");
  if (w.size() != z.size()) throw Error(ErrorCode::DomainError, "dimension mismatch");
  const double ratio = (1.0 - w.squaredNorm()) * (1.0 - z.squaredNorm()) / std::norm(1.0 - ball_inner(w, z));
  return std::sqrt(std::clamp(1.0 - ratio, 0.0, 1.0));
}

inline double ball_distance(const BallPoint& w, const BallPoint& z) { return std::atanh(std::min(c_star_ball(w, z), 1.0)); }

struct LocusResult {
  bool on_locus = false;
  double im_value = 0;     // Im(z2 (1 - conj z1))
  bool f_defined = true;   // on the sphere the denominator vanishes only at (1, 0), where F is 0/0
  double f_modulus = 0;    // |F(z)| when defined
};

/// On the unit sphere |F(z)| = 1 iff Im(z2 (1 - conj z1)) = 0. The condition
/// is still reported at the indeterminacy point, where |F| is left undefined.
inline LocusResult boundary_modulus_locus(const BallPoint& z, double tol = kDefaultTolerances.boundary, double pole_tol = kDefaultTolerances.pole) {
  if (z.size() != 2) throw Error(ErrorCode::DomainError, "locus is defined on the 2-sphere");
  for (Eigen::Index j = 0; j < 2; ++j) require_finite(z[j], "z");
  if (std::abs(z.norm() - 1.0) > 1e-9) throw Error(ErrorCode::DomainError, "point is not on the unit sphere");
  const auto p = detail::f_parts(z[0], z[1]);
  LocusResult r;
  r.im_value = (z[1] * (1.0 - std::conj(z[0]))).imag();
  r.on_locus = std::abs(r.im_value) <= tol;
  if (std::abs(p.den) < pole_tol) {
    r.f_defined = false;
    r.f_modulus = std::nan("");
    return r;
  }
  r.f_modulus = std::abs(p.num / p.den);
  return r;
}

}  // namespace carathset
