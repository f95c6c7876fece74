#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carathset/core.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/random.hpp"
#include "carathset/varieties.hpp"

namespace carathset {

// ---------------------------------------------------------------------------
// Analytic discs with rational components.

inline Complex ipow(Complex z, int n) {
  Complex r{1.0};
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

/// lambda -> lambda^lambda_power * num(lambda) / den(lambda).
struct RationalComponent {
  int lambda_power = 0;
  Quadratic num{0.0, 0.0, 0.0};
  Quadratic den{0.0, 0.0, 1.0};

  Complex operator()(Complex lambda) const {
    return ipow(lambda, lambda_power) * num(lambda) / den(lambda);
  }

  Complex derivative(Complex lambda) const {
    const Complex n = num(lambda), d = den(lambda);
    const Complex q = n / d;
    const Complex dq = (num.derivative(lambda) * d - n * den.derivative(lambda)) / (d * d);
    if (lambda_power == 0) return dq;
    return static_cast<double>(lambda_power) * ipow(lambda, lambda_power - 1) * q + ipow(lambda, lambda_power) * dq;
  }

  static RationalComponent identity() { return {1, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}}; }

  // lambda -> nu-Möbius of (u lambda): (nu - u lambda) / (1 - conj(nu) u lambda).
  static RationalComponent mobius_of_rotation(Complex nu, Complex u, int lambda_power = 0) {
    return {lambda_power, {0.0, -u, nu}, {0.0, -std::conj(nu) * u, 1.0}};
  }
};

enum class DiscTag { PhiGamma, BlaschkeFamily, Balanced, Flat };

constexpr std::string_view to_string(DiscTag tag) {
  switch (tag) {
    case DiscTag::PhiGamma: return "PhiGamma";
    case DiscTag::BlaschkeFamily: return "BlaschkeFamily";
    case DiscTag::Balanced: return "Balanced";
    case DiscTag::Flat: return "Flat";
  }
  return "Flat";
}

/// Analytic disc lambda -> post(c_1(lambda), ..., c_n(lambda)); `post` is only
/// used for three-component discs relocated by a tridisc automorphism.
struct AnalyticDisc {
  std::vector<RationalComponent> components;
  DiscTag tag = DiscTag::Flat;
  std::map<std::string, Complex> params;
  std::optional<TridiscAutomorphism> post;

  std::size_t dimension() const { return components.size(); }

  std::vector<Complex> operator()(Complex lambda) const {
    std::vector<Complex> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(c(lambda));
    if (post && out.size() == 3) {
      const TriPoint w = (*post)(TriPoint{out[0], out[1], out[2]});
      out.assign(w.begin(), w.end());
    }
    return out;
  }

  // Valid for three-component discs only.
  TriPoint tri(Complex lambda) const {
    const auto v = (*this)(lambda);
    return {v.at(0), v.at(1), v.at(2)};
  }

  // Derivative of the raw components (before `post`).
  std::vector<Complex> raw_derivative(Complex lambda) const {
    std::vector<Complex> out;
    for (const auto& c : components) out.push_back(c.derivative(lambda));
    return out;
  }
};

/// Max |membership residual| over `samples` points of the circle |lambda| = radius.
inline double disc_variety_residual(const AnalyticDisc& disc, const Alpha& alpha, int samples = 32, double radius = 0.9) {
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * kPi * (k + 0.5) / samples;
    const Complex lambda = radius * Complex(std::cos(t), std::sin(t));
    worst = std::max(worst, std::abs(membership_residual(alpha, disc.tri(lambda))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// The lens of tangent directions at the origin of M_(a, b, 1).

/// {gamma in C^2 : a gamma1 + b gamma2 + 1 = 0, |gamma1| < 1, |gamma2| < 1},
/// parametrised by gamma1.
struct Lens {
  double a = 0;
  double b = 0;

  Lens() = default;
  Lens(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0 && b > 0) || !std::isfinite(a) || !std::isfinite(b))
      throw Error(ErrorCode::ParameterViolation, "lens needs a, b > 0");
  }

  bool nonempty() const { return std::abs(a - b) < 1.0 && 1.0 < a + b; }

  Alpha alpha() const { return {a, b, 1.0}; }
};

struct LensPoint {
  Complex gamma1{0.0};

  Complex gamma2(const Lens& lens) const { return -(lens.a * gamma1 + 1.0) / lens.b; }
};

inline bool lens_contains(const Lens& lens, const LensPoint& p, double tol = 0.0) {
  if (!is_finite(p.gamma1)) return false;
  return std::abs(p.gamma1) < 1.0 - tol && std::abs(lens.a * p.gamma1 + 1.0) < lens.b - tol * lens.b;
}

/// The two points of the lens closure lying on the torus, upper one first.
inline std::pair<Complex, Complex> lens_corners(const Lens& lens) {
  if (!lens.nonempty()) throw Error(ErrorCode::EmptyLens, "lens has no corners unless {a, b, 1} satisfies the strict triangle inequality");
  const double c = (lens.b * lens.b - lens.a * lens.a - 1.0) / (2.0 * lens.a);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return {{c, s}, {c, -s}};
}

/// Rejection sample of a lens point, uniform in gamma1. Draws from the
/// bounding box of the two discs so thin lenses near tangency stay cheap.
inline LensPoint sample_lens_point(const Lens& lens, CounterRng& rng) {
  if (!lens.nonempty()) throw Error(ErrorCode::EmptyLens, "cannot sample an empty lens");
  const double c = -1.0 / lens.a, r = lens.b / lens.a;
  const double x0 = std::max(-1.0, c - r), x1 = std::min(1.0, c + r), y = std::min(1.0, r);
  for (;;) {
    const LensPoint p{Complex(rng.uniform(x0, x1), rng.uniform(-y, y))};
    if (lens_contains(lens, p)) return p;
  }
}

// ---------------------------------------------------------------------------
// The unimodular pairs (omega, eta) with
//   a omega (1 - |g1|^2) + b eta (1 - |g2|^2) + a g2 + b g1 + g1 g2 = 0.

enum class Branch { Plus, Minus };

constexpr std::string_view to_string(Branch b) { return b == Branch::Plus ? "Plus" : "Minus"; }

struct OmegaEta {
  Complex omega{1.0};
  Complex eta{1.0};
  Branch branch = Branch::Plus;
};

/// Terms of the linear equation: r1 omega + r2 eta = -q.
struct LinkLengths {
  double r1 = 0;
  double r2 = 0;
  Complex q{0.0};

  // |r1 - r2| < |q| < r1 + r2 is the solvability chain; gaps are positive inside the lens.
  double lower_gap() const { return std::abs(q) - std::abs(r1 - r2); }
  double upper_gap() const { return r1 + r2 - std::abs(q); }
};

inline LinkLengths link_lengths(const Lens& lens, const LensPoint& p) {
  const Complex g1 = p.gamma1, g2 = p.gamma2(lens);
  return {lens.a * (1.0 - std::norm(g1)), lens.b * (1.0 - std::norm(g2)), lens.a * g2 + lens.b * g1 + g1 * g2};
}

/// Both solution pairs, Plus first. Plus/Minus is the sign of the oriented
/// angle from -q to r1 omega.
inline std::array<OmegaEta, 2> solve_omega_eta(const Lens& lens, const LensPoint& p, double tol = kDefaultTolerances.boundary) {
  if (!lens_contains(lens, p)) throw Error(ErrorCode::Infeasible, "gamma is not inside the lens");
  const LinkLengths k = link_lengths(lens, p);
  const double lower = k.lower_gap(), upper = k.upper_gap();
  if (lower < -tol || upper < -tol) throw Error(ErrorCode::Infeasible, "two-sided inequality fails");
  if (lower <= tol || upper <= tol) throw Error(ErrorCode::Tangent, "two-link configuration is degenerate");

  const Complex s = -k.q;
  const double d = std::abs(s);
  const double cos_phi = std::clamp((k.r1 * k.r1 + d * d - k.r2 * k.r2) / (2.0 * k.r1 * d), -1.0, 1.0);
  const double phi = std::acos(cos_phi);
  const double base = std::arg(s);
  std::array<OmegaEta, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const double sign = i == 0 ? 1.0 : -1.0;
    const Complex omega = std::polar(1.0, base + sign * phi);
    Complex eta = (s - k.r1 * omega) / k.r2;
    eta /= std::abs(eta);
    out[static_cast<std::size_t>(i)] = {omega, eta, i == 0 ? Branch::Plus : Branch::Minus};
  }
  return out;
}

inline OmegaEta solve_omega_eta(const Lens& lens, const LensPoint& p, Branch branch, double tol = kDefaultTolerances.boundary) {
  return solve_omega_eta(lens, p, tol)[branch == Branch::Plus ? 0 : 1];
}

/// Phi_gamma(lambda) = (lambda m_{g1}(omega lambda), lambda m_{g2}(eta lambda), lambda),
/// a complex geodesic of M_(a, b, 1) through 0 with Phi'(0) = (g1, g2, 1).
/// This overload takes (omega, eta) as given, for callers that know them more
/// accurately than solve_omega_eta can recover them near a lens corner.
inline AnalyticDisc phi_gamma(const Lens& lens, const LensPoint& p, const OmegaEta& oe, double residual_tol = kDefaultTolerances.residual) {
  const Complex g1 = p.gamma1, g2 = p.gamma2(lens);
  AnalyticDisc disc;
  disc.tag = DiscTag::PhiGamma;
  disc.components = {RationalComponent::mobius_of_rotation(g1, oe.omega, 1),
                     RationalComponent::mobius_of_rotation(g2, oe.eta, 1), RationalComponent::identity()};
  disc.params = {{"a", lens.a}, {"b", lens.b}, {"gamma1", g1}, {"gamma2", g2},
                 {"omega", oe.omega}, {"eta", oe.eta}, {"branch", oe.branch == Branch::Plus ? 1.0 : -1.0}};
  const double res = disc_variety_residual(disc, lens.alpha());
  if (!(res <= residual_tol)) throw Error(ErrorCode::ResidualCheck, "Phi_gamma leaves the variety, residual " + std::to_string(res));
  return disc;
}

inline AnalyticDisc phi_gamma(const Lens& lens, const LensPoint& p, Branch branch, double residual_tol = kDefaultTolerances.residual) {
  return phi_gamma(lens, p, solve_omega_eta(lens, p, branch), residual_tol);
}

/// Continuous selection of (omega, eta) along a path of lens points: each
/// step takes the solution nearest to the previous one on the torus.
inline std::vector<OmegaEta> branch_track(const Lens& lens, const std::vector<LensPoint>& path, Branch start = Branch::Plus,
                                          double collision_tol = 1e-6) {
  std::vector<OmegaEta> out;
  out.reserve(path.size());
  auto torus_dist = [](const OmegaEta& x, const OmegaEta& y) {
    return angular_distance(std::arg(x.omega), std::arg(y.omega)) + angular_distance(std::arg(x.eta), std::arg(y.eta));
  };
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::array<OmegaEta, 2> sol;
    try {
      sol = solve_omega_eta(lens, path[i]);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Tangent) throw Error(ErrorCode::BranchCollision, "solutions coalesce at path index " + std::to_string(i));
      throw;
    }
    const double separation = torus_dist(sol[0], sol[1]);
    if (separation < collision_tol) throw Error(ErrorCode::BranchCollision, "solutions coalesce at path index " + std::to_string(i));
    if (i == 0) {
      out.push_back(sol[start == Branch::Plus ? 0 : 1]);
      continue;
    }
    const double d0 = torus_dist(sol[0], out.back()), d1 = torus_dist(sol[1], out.back());
    const OmegaEta& pick = d0 <= d1 ? sol[0] : sol[1];
    // A step that moves more than half the separation is ambiguous.
    if (std::min(d0, d1) >= 0.5 * separation)
      throw Error(ErrorCode::BranchCollision, "step too large to follow a branch at path index " + std::to_string(i));
    out.push_back(pick);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The degree-two Blaschke family (lambda psi(lambda), G(lambda), lambda) with
// psi = m_gamma(omega lambda) and G solving the variety for z2.

/// Quantities of the admissibility inequality R > |w + omega v|.
struct AdmissibilityTerms {
  double radius = 0;  // b^2 - |a gamma + 1|^2
  Complex w{0.0};     // -a b (1 - |gamma|^2)
  Complex v{0.0};     // a conj(gamma)^2 + (a^2 - b^2 + 1) conj(gamma) + a
};

inline AdmissibilityTerms admissibility_terms(const Lens& lens, Complex gamma) {
  const double a = lens.a, b = lens.b;
  const Complex gc = std::conj(gamma);
  return {b * b - std::norm(a * gamma + 1.0), -a * b * (1.0 - std::norm(gamma)), a * gc * gc + (a * a - b * b + 1.0) * gc + a};
}

/// Positive iff omega is admissible: R - |w + omega v|.
inline double admissibility_slack(const Lens& lens, Complex gamma, Complex omega) {
  const auto t = admissibility_terms(lens, gamma);
  return t.radius - std::abs(t.w + omega * t.v);
}

/// Same inequality in lens coordinates: b(1 - |g2|^2) - |a(1 - |g1|^2) + conj(omega) q|.
/// Equals admissibility_slack / b.
inline double admissibility_slack_lens_form(const Lens& lens, Complex gamma, Complex omega) {
  const LinkLengths k = link_lengths(lens, LensPoint{gamma});
  return k.r2 - std::abs(k.r1 + std::conj(omega) * k.q);
}

/// Second component numerator and denominator (without the lambda factor).
inline std::pair<Quadratic, Quadratic> blaschke_second_component(const Lens& lens, Complex gamma, Complex omega) {
  const double a = lens.a, b = lens.b;
  const Complex gc = std::conj(gamma);
  const Quadratic num{b * omega, -a * omega - gc * omega - b * gamma, a * gamma + 1.0};
  const Quadratic den{-omega * (1.0 + a * gc), gamma + a + b * gc * omega, -b};
  return {num, den};
}

/// The disc for (omega, gamma) if the denominator of G passes the Schur test,
/// nullopt (inadmissible) otherwise.
inline std::optional<AnalyticDisc> blaschke_family(const Lens& lens, Complex gamma, Complex omega,
                                                   double tol = kDefaultTolerances.boundary) {
  require_in_disc(gamma, "gamma");
  if (!is_unimodular(omega, 1e-10)) throw Error(ErrorCode::ParameterViolation, "omega must be unimodular");
  if (!(admissibility_slack(lens, gamma, omega) > tol)) return std::nullopt;
  auto [num, den] = blaschke_second_component(lens, gamma, omega);
  if (!schur_roots_outside(den, tol)) return std::nullopt;
  AnalyticDisc disc;
  disc.tag = DiscTag::BlaschkeFamily;
  disc.components = {RationalComponent::mobius_of_rotation(gamma, omega, 1), RationalComponent{1, num, den},
                     RationalComponent::identity()};
  disc.params = {{"a", lens.a}, {"b", lens.b}, {"gamma", gamma}, {"omega", omega}};
  const double res = disc_variety_residual(disc, lens.alpha());
  if (!(res <= kDefaultTolerances.residual)) throw Error(ErrorCode::ResidualCheck, "Blaschke disc leaves the variety");
  return disc;
}

/// Union of open arcs of angles, each stored as [start, start + length) with
/// start in [0, 2 pi).
struct ArcSet {
  std::vector<std::pair<double, double>> arcs;

  bool empty() const { return arcs.empty(); }

  bool contains(double theta) const {
    for (const auto& [start, length] : arcs)
      if (wrap_angle(theta - start) < length) return true;
    return false;
  }

  double total_length() const {
    double s = 0;
    for (const auto& arc : arcs) s += arc.second;
    return s;
  }
};

/// Angles theta with omega = e^{i theta} admissible, from |w + omega v| < R.
inline ArcSet admissible_arc(const Lens& lens, Complex gamma) {
  const auto t = admissibility_terms(lens, gamma);
  ArcSet set;
  if (t.radius <= 0.0) return set;
  const double nv = std::abs(t.v), nw = std::abs(t.w);
  if (nv == 0.0 || nw == 0.0) {
    // |w + omega v| is constant in omega.
    if (nw + nv < t.radius) set.arcs.push_back({0.0, 2.0 * kPi});
    return set;
  }
  // |w + omega v|^2 = |w|^2 + |v|^2 + 2|w||v| cos(theta + arg v - arg w).
  const double kappa = (t.radius * t.radius - nw * nw - nv * nv) / (2.0 * nw * nv);
  if (kappa <= -1.0) return set;
  if (kappa >= 1.0) {
    set.arcs.push_back({0.0, 2.0 * kPi});
    return set;
  }
  const double half = kPi - std::acos(kappa);
  const double center = std::arg(t.w) - std::arg(t.v) + kPi;
  set.arcs.push_back({wrap_angle(center - half), 2.0 * half});
  return set;
}

// ---------------------------------------------------------------------------
// Balanced pairs in the bidisc.

struct BalancedGeodesic {
  AnalyticDisc disc;  // lambda -> (m_{z1}(lambda), m_{z2}(omega lambda))
  Complex param_at_w{0.0};
  Complex omega{1.0};
};

/// The unique bidisc geodesic through z and w when rho(z1, w1) = rho(z2, w2).
inline std::optional<BalancedGeodesic> balanced_pair(const BiPoint& z, const BiPoint& w, double tol = kDefaultTolerances.boundary) {
  for (const auto& c : z) require_in_disc(c, "z");
  for (const auto& c : w) require_in_disc(c, "w");
  if (std::abs(rho(z[0], w[0]) - rho(z[1], w[1])) > tol) return std::nullopt;
  const MobiusMap m1(z[0]), m2(z[1]);
  const Complex w1 = m1(w[0]), w2 = m2(w[1]);
  if (std::abs(w1) < 1e-15 || std::abs(w2) < 1e-15) throw Error(ErrorCode::DegenerateDirection, "direction is undefined for w = z");
  const Complex omega = (w2 / w1) / std::abs(w2 / w1);
  BalancedGeodesic g;
  g.omega = omega;
  g.param_at_w = w1;
  g.disc.tag = DiscTag::Balanced;
  g.disc.components = {RationalComponent::mobius_of_rotation(z[0], 1.0), RationalComponent::mobius_of_rotation(z[1], omega)};
  g.disc.params = {{"omega", omega}, {"z1", z[0]}, {"z2", z[1]}};
  return g;
}

}  // namespace carathset
