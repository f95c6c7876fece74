#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "carathset/core.hpp"

namespace carathset {

/// Möbius pseudodistance |(z - w) / (1 - conj(w) z)| on the unit disc.
inline double mobius_dist(Complex z, Complex w) {
  require_in_disc(z, "z");
  require_in_disc(w, "w");
  return std::min(std::abs(z - w) / std::abs(1.0 - std::conj(w) * z), 1.0);
}

/// Hyperbolic distance on the unit disc, normalised so that rho(0, t) = arctanh t.
inline double rho(Complex z, Complex w) { return std::atanh(mobius_dist(z, w)); }

/// Infinitesimal hyperbolic metric |X| / (1 - |w|^2).
inline double gamma_disc(Complex w, Complex x) {
  require_in_disc(w, "w");
  require_finite(x, "X");
  return std::abs(x) / (1.0 - std::norm(w));
}

/// Disc automorphism lambda -> rotation * (nu - lambda) / (1 - conj(nu) lambda).
class MobiusMap {
 public:
  MobiusMap() = default;

  MobiusMap(Complex nu, Complex rotation = 1.0) : nu_(nu), rotation_(rotation) {
    require_in_disc(nu, "Möbius pole parameter");
    require_finite(rotation, "Möbius rotation");
    if (!is_unimodular(rotation, 1e-10)) throw Error(ErrorCode::ParameterViolation, "Möbius rotation must be unimodular");
    rotation_ /= std::abs(rotation_);
  }

  /// lambda -> u * lambda.
  static MobiusMap multiplication(Complex u) { return MobiusMap(0.0, -u); }

  static MobiusMap identity() { return multiplication(1.0); }

  Complex nu() const { return nu_; }
  Complex rotation() const { return rotation_; }

  // Valid on the whole Riemann sphere minus the pole 1/conj(nu).
  Complex operator()(Complex lambda) const {
    return rotation_ * (nu_ - lambda) / (1.0 - std::conj(nu_) * lambda);
  }

  Complex derivative(Complex lambda) const {
    const Complex d = 1.0 - std::conj(nu_) * lambda;
    return rotation_ * (std::norm(nu_) - 1.0) / (d * d);
  }

  MobiusMap inverse() const { return MobiusMap(rotation_ * nu_, std::conj(rotation_)); }

  /// (*this) o inner.
  MobiusMap compose(const MobiusMap& inner) const {
    const MobiusMap inv_outer = inverse();
    const Complex pole = inner.inverse()(inv_outer(0.0));  // preimage of 0
    // Pick a reference point away from the pole to read off the rotation.
    const Complex probe = std::abs(pole) < 0.5 ? Complex(0.75, 0.0) : Complex(0.0, 0.0);
    const Complex value = (*this)(inner(probe));
    const Complex rot = value * (1.0 - std::conj(pole) * probe) / (pole - probe);
    return MobiusMap(pole, rot / std::abs(rot));
  }

 private:
  Complex nu_{0.0};
  Complex rotation_{-1.0};  // default-constructed map is the identity
};

/// Coefficients of A lambda^2 + B lambda + C0.
struct Quadratic {
  Complex a{0.0};
  Complex b{0.0};
  Complex c0{0.0};

  Complex operator()(Complex lambda) const { return (a * lambda + b) * lambda + c0; }

  Complex derivative(Complex lambda) const { return 2.0 * a * lambda + b; }

  bool is_zero() const { return a == 0.0 && b == 0.0 && c0 == 0.0; }

  // Degree treating exact zeros as absent; -1 for the zero polynomial.
  int degree() const {
    if (a != 0.0) return 2;
    if (b != 0.0) return 1;
    if (c0 != 0.0) return 0;
    return -1;
  }

  double max_coefficient() const { return std::max({std::abs(a), std::abs(b), std::abs(c0)}); }

  // Coefficient of lambda^k.
  Complex coefficient(int k) const { return k == 0 ? c0 : (k == 1 ? b : a); }

  static Quadratic from_coefficients(const std::array<Complex, 3>& by_power) {
    return {by_power[2], by_power[1], by_power[0]};
  }
};

/// True iff every root of q lies strictly outside the closed unit disc.
///
/// Degree two uses the Schur-Cohn coefficient test |C| > |A| and
/// |C|^2 - |A|^2 > |B conj(C) - A conj(B)|; lower degrees are handled
/// directly (a nonzero constant passes vacuously). The polynomial is scaled
/// to unit max coefficient before comparing against `tol`.
inline bool schur_roots_outside(const Quadratic& q, double tol = kDefaultTolerances.boundary) {
  if (q.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "zero polynomial has no well-defined roots");
  const double s = q.max_coefficient();
  const Complex a = q.a / s, b = q.b / s, c = q.c0 / s;
  switch (q.degree()) {
    case 0:
      return true;
    case 1:
      return std::abs(c) - std::abs(b) > tol;  // root -C/B
    default:
      if (!(std::abs(c) - std::abs(a) > tol)) return false;
      return std::norm(c) - std::norm(a) - std::abs(b * std::conj(c) - a * std::conj(b)) > tol;
  }
}

namespace detail {

// Winding number of f around 0 along the unit circle.
template <class F>
int winding_number(F&& f, int samples = 1024) {
  double total = 0;
  Complex prev = f(Complex(1.0, 0.0));
  for (int k = 1; k <= samples; ++k) {
    const double t = 2.0 * kPi * k / samples;
    const Complex cur = f(Complex(std::cos(t), std::sin(t)));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

}  // namespace detail

/// Degree of num/den as a finite Blaschke product, or nullopt if it is not one.
///
/// First tries the self-inversive identity num = u * lambda^k * den^*, where
/// den^* is the reflection of den; otherwise samples |num/den| at 64 points of
/// the unit circle and reads the degree off the winding number.
inline std::optional<int> blaschke_degree(const Quadratic& num, const Quadratic& den,
                                          double tol = kDefaultTolerances.boundary) {
  if (den.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "zero denominator");
  if (!schur_roots_outside(den, tol)) throw Error(ErrorCode::PoleError, "denominator has a root in the closed unit disc");
  if (num.is_zero()) return std::nullopt;

  const int d = den.degree();
  std::array<Complex, 3> reflected{};  // by power
  for (int k = 0; k <= d; ++k) reflected[static_cast<std::size_t>(d - k)] = std::conj(den.coefficient(k));

  const double scale = std::max(num.max_coefficient(), den.max_coefficient());
  for (int shift = 0; d + shift <= 2; ++shift) {
    std::array<Complex, 3> cand{};
    for (int k = 0; k + shift <= 2; ++k) cand[static_cast<std::size_t>(k + shift)] = reflected[static_cast<std::size_t>(k)];
    std::size_t lead = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (std::abs(cand[k]) > std::abs(cand[lead])) lead = k;
    const Complex u = num.coefficient(static_cast<int>(lead)) / cand[lead];
    if (!is_unimodular(u, tol)) continue;
    bool match = true;
    for (int k = 0; k < 3 && match; ++k)
      match = std::abs(num.coefficient(k) - u * cand[static_cast<std::size_t>(k)]) <= tol * scale;
    if (match) return d + shift;
  }

  auto f = [&](Complex z) { return num(z) / den(z); };
  for (int k = 0; k < 64; ++k) {
    const double t = 2.0 * kPi * k / 64.0;
    if (std::abs(std::abs(f(Complex(std::cos(t), std::sin(t)))) - 1.0) > tol) return std::nullopt;
  }
  return detail::winding_number(f);
}

}  // namespace carathset
