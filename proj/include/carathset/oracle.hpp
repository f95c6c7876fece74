#pragma once

// Brute-force cross-checks. Nothing here calls the primary formulas it is
// used to check: roots, distances and membership are recomputed locally.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "carathset/core.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/geodesics.hpp"
#include "carathset/random.hpp"

namespace carathset::oracle {

enum class Region { Lens, Polydisc, Ball, Circle };

/// Deterministic point stream: point i depends only on (seed, i).
struct SampleGrid {
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
  Region region = Region::Polydisc;
  int dim = 2;
  double a = 0;  // lens parameters
  double b = 0;

  std::vector<Complex> at(std::uint64_t i) const {
    CounterRng rng(seed, i);
    switch (region) {
      case Region::Lens:
        for (;;) {
          const Complex g = rng.in_box(1.0);
          if (std::abs(g) < 1.0 && std::abs(a * g + 1.0) < b) return {g};
        }
      case Region::Polydisc: {
        std::vector<Complex> v;
        for (int j = 0; j < dim; ++j) v.push_back(rng.in_disc());
        return v;
      }
      case Region::Ball:
        return rng.in_ball(dim);
      case Region::Circle:
        return {rng.unimodular()};
    }
    return {};
  }
};

/// Roots of A x^2 + B x + C0 by the sign-matched quadratic formula.
inline std::vector<Complex> quadratic_roots(Complex A, Complex B, Complex C0) {
  if (A == 0.0 && B == 0.0 && C0 == 0.0) throw Error(ErrorCode::ZeroPolynomial, "zero polynomial");
  if (A == 0.0) {
    if (B == 0.0) return {};
    return {-C0 / B};
  }
  const Complex sq = std::sqrt(B * B - 4.0 * A * C0);
  // pick the sign that avoids cancellation in -B -+ sq
  const Complex qv = (std::real(std::conj(B) * sq) >= 0.0) ? -0.5 * (B + sq) : -0.5 * (B - sq);
  if (qv == 0.0) return {0.0, 0.0};  // B = 0 and C0 = 0
  return {qv / A, C0 / qv};
}

inline std::vector<Complex> quadratic_roots(const Quadratic& q) { return quadratic_roots(q.a, q.b, q.c0); }

inline bool roots_outside(const Quadratic& q) {
  for (const Complex r : quadratic_roots(q))
    if (!(std::abs(r) > 1.0)) return false;
  return true;
}

inline double min_root_distance_to_circle(const Quadratic& q) {
  double d = 1e300;
  for (const Complex r : quadratic_roots(q)) d = std::min(d, std::abs(std::abs(r) - 1.0));
  return d;
}

/// 0.5 log((1 + p) / (1 - p)) with p the pseudo-hyperbolic distance.
inline double hyperbolic(Complex z, Complex w) {
  const double p = std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
  return 0.5 * std::log((1.0 + p) / (1.0 - p));
}

using ScalarMap = std::function<Complex(std::span<const Complex>)>;

struct LowerBound {
  double value = 0;
  std::vector<std::size_t> out_of_disc;  // members that left the disc at z or w
};

/// max over the family of rho(f(z), f(w)); members leaving the disc are
/// reported and skipped.
inline LowerBound caratheodory_lower_bound(const std::vector<ScalarMap>& family, std::span<const Complex> z,
                                           std::span<const Complex> w) {
  LowerBound out;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const Complex fz = family[k](z), fw = family[k](w);
    if (!(std::abs(fz) < 1.0) || !(std::abs(fw) < 1.0)) {
      out.out_of_disc.push_back(k);
      continue;
    }
    out.value = std::max(out.value, hyperbolic(fz, fw));
  }
  return out;
}

/// rho(lz, lw) for a disc hitting z at lz and w at lw.
inline double lempert_upper_bound(const AnalyticDisc& disc, std::span<const Complex> z, Complex lz, std::span<const Complex> w,
                                  Complex lw, double tol = 1e-9) {
  const auto hz = disc(lz), hw = disc(lw);
  if (hz.size() != z.size() || hw.size() != w.size()) throw Error(ErrorCode::DomainError, "dimension mismatch");
  for (std::size_t j = 0; j < z.size(); ++j)
    if (std::abs(hz[j] - z[j]) > tol || std::abs(hw[j] - w[j]) > tol) throw Error(ErrorCode::NotThrough, "disc misses a point");
  // the image must stay in the polydisc along the way
  for (int k = 0; k < 32; ++k) {
    const Complex lam = 0.98 * std::polar(1.0, 2.0 * kPi * k / 32.0);
    for (const Complex c : disc(lam))
      if (!(std::abs(c) < 1.0)) throw Error(ErrorCode::EvaluationOutOfDisc, "disc leaves the polydisc");
  }
  return hyperbolic(lz, lw);
}

inline Complex finite_diff_derivative(const ScalarMap& f, std::span<const Complex> z, std::span<const Complex> direction, double h = 1e-6) {
  if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "step must be positive");
  std::vector<Complex> zp(z.begin(), z.end()), zm(z.begin(), z.end());
  for (std::size_t j = 0; j < z.size(); ++j) {
    zp[j] += h * direction[j];
    zm[j] -= h * direction[j];
  }
  return (f(zp) - f(zm)) / (2.0 * h);
}

}  // namespace carathset::oracle
