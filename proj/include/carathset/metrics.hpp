#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "carathset/core.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/geodesics.hpp"
#include "carathset/random.hpp"
#include "carathset/varieties.hpp"

namespace carathset {

// ---------------------------------------------------------------------------
// Closed-form invariant functions.

/// Carathéodory distance of the polydisc: max_j rho(z_j, w_j).
inline double c_polydisc(std::span<const Complex> z, std::span<const Complex> w) {
  if (z.size() != w.size()) throw Error(ErrorCode::DomainError, "points have different dimensions");
  double best = 0;
  for (std::size_t j = 0; j < z.size(); ++j) best = std::max(best, rho(z[j], w[j]));
  return best;
}

inline double c_polydisc(const TriPoint& z, const TriPoint& w) {
  return c_polydisc(std::span<const Complex>(z), std::span<const Complex>(w));
}

/// max{rho(z1, w1), rho(z2, w2), rho(F(z), F(w))} on D_{a,b}.
inline double c_dab(const DomainDab& d, const BiPoint& z, const BiPoint& w) {
  if (!dab_contains(d, z) || !dab_contains(d, w)) throw Error(ErrorCode::NotInDomain, "point is not in D_{a,b}");
  return std::max({rho(z[0], w[0]), rho(z[1], w[1]), rho(dab_function(d, z), dab_function(d, w))});
}

/// Kobayashi-Royden (= Carathéodory-Reiffen) metric of D_{a,b} at the origin.
inline double kappa_dab_origin(const DomainDab& d, const BiPoint& x) {
  return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(d.a * x[0] + d.b * x[1])});
}

inline bool indicatrix_membership(const DomainDab& d, const BiPoint& x) { return kappa_dab_origin(d, x) < 1.0; }

/// c_M(0, z) = l_M(0, z) = max_j rho(0, z_j) for z on the normalised variety.
inline double c_M_origin(const NormalForm& nf, const TriPoint& z, double tol = kDefaultTolerances.residual) {
  require_in_polydisc(z, "z");
  if (std::abs(membership_residual(nf.alpha(), z)) > tol) throw Error(ErrorCode::NotOnVariety, "point is not on the variety");
  return std::max({rho(0.0, z[0]), rho(0.0, z[1]), rho(0.0, z[2])});
}

/// psi_x(gamma) = (m_{g1}(omega x), m_{g2}(eta x)), the slice coordinates of Phi_gamma(x) / x.
inline BiPoint psi_x_forward(const Lens& lens, const LensPoint& p, Branch branch, Complex x, double tol = kDefaultTolerances.boundary) {
  require_in_disc(x, "x");
  if (x == 0.0) throw Error(ErrorCode::DomainError, "x must be nonzero");
  const OmegaEta oe = solve_omega_eta(lens, p, branch, tol);
  return {MobiusMap(p.gamma1)(oe.omega * x), MobiusMap(p.gamma2(lens))(oe.eta * x)};
}

// ---------------------------------------------------------------------------
// Geodesics through arbitrary points of M_alpha by inverting psi_x.

struct InversionOptions {
  int max_iterations = 80;
  double fd_step = 1e-7;
  double converged = 1e-12;  // slice residual that stops the multistart early
  double accept = 1e-9;      // slice residual accepted as a solution
  double variety_tol = 1e-9;
  std::vector<int> grids{8};  // lens grid sizes tried in turn
  bool collect_alternatives = false;
};

struct LensSolution {
  LensPoint gamma;
  Branch branch = Branch::Plus;
  double residual = 0;
  std::optional<OmegaEta> pair;  // (omega, eta) found directly, bypassing solve_omega_eta
};

struct GeodesicCertificate {
  AnalyticDisc disc;
  Complex param_at_target{0.0};
  double residual = 0;             // max over the two endpoints of |disc(param) - point|
  double caratheodory_value = 0;   // lower bound from coordinate projections
  double lempert_value = 0;        // rho(0, param_at_target)
  LensPoint gamma;
  Branch branch = Branch::Plus;
  std::array<int, 3> perm{0, 1, 2};  // slot order used: dominant coordinate last
  std::vector<LensSolution> alternatives;
};

namespace detail {

inline std::optional<BiPoint> try_psi(const Lens& lens, Complex gamma1, Branch branch, Complex x) {
  const LensPoint p{gamma1};
  if (!lens_contains(lens, p)) return std::nullopt;
  try {
    return psi_x_forward(lens, p, branch, x, 0.0);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline double slice_norm(const BiPoint& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

// Gauss-Newton on gamma1 (two real unknowns, four real residuals).
inline LensSolution newton_from(const Lens& lens, Complex gamma1, Branch branch, Complex x, const BiPoint& target,
                                const InversionOptions& opt) {
  LensSolution best{{gamma1}, branch, 1e300};
  auto value = try_psi(lens, gamma1, branch, x);
  if (!value) return best;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const BiPoint r{(*value)[0] - target[0], (*value)[1] - target[1]};
    const double rn = slice_norm(r);
    if (rn < best.residual) best = {{gamma1}, branch, rn};
    if (rn < 1e-14) break;

    const double margin = std::min({1.0, 1.0 - std::abs(gamma1), (lens.b - std::abs(lens.a * gamma1 + 1.0)) / lens.a});
    const double h = opt.fd_step * margin;
    std::array<std::array<double, 2>, 4> jac{};
    bool ok = true;
    for (int k = 0; k < 2 && ok; ++k) {
      const Complex dg = k == 0 ? Complex(h, 0.0) : Complex(0.0, h);
      const auto fp = try_psi(lens, gamma1 + dg, branch, x);
      const auto fm = try_psi(lens, gamma1 - dg, branch, x);
      if (!fp || !fm) {
        ok = false;
        break;
      }
      const Complex d0 = ((*fp)[0] - (*fm)[0]) / (2.0 * h), d1 = ((*fp)[1] - (*fm)[1]) / (2.0 * h);
      jac[0][static_cast<std::size_t>(k)] = d0.real();
      jac[1][static_cast<std::size_t>(k)] = d0.imag();
      jac[2][static_cast<std::size_t>(k)] = d1.real();
      jac[3][static_cast<std::size_t>(k)] = d1.imag();
    }
    if (!ok) break;
    const std::array<double, 4> rv{r[0].real(), r[0].imag(), r[1].real(), r[1].imag()};
    double m00 = 0, m01 = 0, m11 = 0, g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      m00 += jac[i][0] * jac[i][0];
      m01 += jac[i][0] * jac[i][1];
      m11 += jac[i][1] * jac[i][1];
      g0 -= jac[i][0] * rv[i];
      g1 -= jac[i][1] * rv[i];
    }
    const double det = m00 * m11 - m01 * m01;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
    const Complex step((m11 * g0 - m01 * g1) / det, (m00 * g1 - m01 * g0) / det);

    // Damping by halving until the residual decreases inside the lens.
    double t = 1.0;
    bool moved = false;
    while (t > 1e-9) {
      const Complex trial = gamma1 + t * step;
      if (auto v = try_psi(lens, trial, branch, x)) {
        const BiPoint rt{(*v)[0] - target[0], (*v)[1] - target[1]};
        if (slice_norm(rt) < rn) {
          gamma1 = trial;
          value = v;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return best;
}

// n x n grid adapted to the lens: columns across its real extent, rows
// spread over the vertical chord at each column. Thin lenses get as many
// starts as fat ones.
inline std::vector<Complex> lens_starts(const Lens& lens, int n = 8) {
  std::vector<Complex> pts;
  const double c = -1.0 / lens.a, r = lens.b / lens.a;
  const double lo = std::max(-1.0, c - r), hi = std::min(1.0, c + r);
  if (!(hi > lo)) return pts;
  for (int i = 0; i < n; ++i) {
    const double u = lo + (hi - lo) * (i + 0.5) / n;
    const double h = std::sqrt(std::max(0.0, std::min(1.0 - u * u, r * r - (u - c) * (u - c))));
    for (int j = 0; j < n; ++j) {
      const Complex g(u, h * (-1.0 + 2.0 * (j + 0.5) / n));
      if (lens_contains(lens, LensPoint{g})) pts.push_back(g);
    }
  }
  return pts;
}

// nu with m_nu(mu) = lam: nu + lam mu conj(nu) = lam + mu is linear in (nu, conj nu).
inline Complex mobius_pole_through(Complex lam, Complex mu) {
  const Complex s = lam + mu, k = lam * mu;
  return (s - k * std::conj(s)) / (1.0 - std::norm(k));
}

// Fallback for targets whose preimage hugs the lens boundary: unknowns are
// the angles of (omega, eta); gamma_j is then forced by the target and the
// only equation left is the lens line a g1 + b g2 + 1 = 0.
inline std::optional<LensSolution> torus_search(const Lens& lens, Complex x, const BiPoint& target, const InversionOptions& opt,
                                                int n = 12) {
  auto gammas = [&](double t1, double t2) {
    return std::pair{mobius_pole_through(target[0], std::polar(1.0, t1) * x), mobius_pole_through(target[1], std::polar(1.0, t2) * x)};
  };
  auto line = [&](double t1, double t2) {
    const auto [g1, g2] = gammas(t1, t2);
    return lens.a * g1 + lens.b * g2 + 1.0;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double t1 = 2.0 * kPi * i / n, t2 = 2.0 * kPi * j / n;
      Complex r = line(t1, t2);
      for (int it = 0; it < opt.max_iterations && std::abs(r) > 1e-15; ++it) {
        const double h = 1e-7;
        const Complex d1 = (line(t1 + h, t2) - line(t1 - h, t2)) / (2.0 * h);
        const Complex d2 = (line(t1, t2 + h) - line(t1, t2 - h)) / (2.0 * h);
        const double det = d1.real() * d2.imag() - d2.real() * d1.imag();
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
        const double s1 = (-r.real() * d2.imag() + d2.real() * r.imag()) / det;
        const double s2 = (-d1.real() * r.imag() + r.real() * d1.imag()) / det;
        double step = 1.0;
        bool moved = false;
        while (step > 1e-10) {
          const Complex rt = line(t1 + step * s1, t2 + step * s2);
          if (std::abs(rt) < std::abs(r)) {
            t1 += step * s1;
            t2 += step * s2;
            r = rt;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
      if (!(std::abs(r) < 1e-12)) continue;
      const LensPoint p{gammas(t1, t2).first};
      if (!lens_contains(lens, p)) continue;
      // Use (omega, eta) as found: near a corner re-solving from gamma loses
      // most digits. The branch is the side of -q that r1 omega lies on.
      const Complex omega = std::polar(1.0, t1), eta = std::polar(1.0, t2);
      const LinkLengths k = link_lengths(lens, p);
      if (!(std::abs(k.r1 * omega + k.r2 * eta + k.q) <= 1e-12)) continue;
      const Branch br = (omega * std::conj(-k.q)).imag() >= 0.0 ? Branch::Plus : Branch::Minus;
      const BiPoint v{MobiusMap(p.gamma1)(omega * x), MobiusMap(p.gamma2(lens))(eta * x)};
      const double res = slice_norm({v[0] - target[0], v[1] - target[1]});
      if (res <= opt.accept) return LensSolution{p, br, res, OmegaEta{omega, eta, br}};
    }
  return std::nullopt;
}

// Slot order with the dominant coordinate last; ties go to the largest index.
inline std::array<int, 3> dominant_last(const TriPoint& z) {
  int k = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(z[static_cast<std::size_t>(j)]) >= std::abs(z[static_cast<std::size_t>(k)])) k = j;
  std::array<int, 3> perm{};
  int slot = 0;
  for (int j = 0; j < 3; ++j)
    if (j != k) perm[static_cast<std::size_t>(slot++)] = j;
  perm[2] = k;
  return perm;
}

}  // namespace detail

/// Lens parameter(s) gamma with psi_x(gamma) = target, for the lens of (a, b).
inline std::vector<LensSolution> invert_psi_x(const Lens& lens, Complex x, const BiPoint& target,
                                              const InversionOptions& opt = {}) {
  std::vector<LensSolution> found;
  LensSolution best{{0.0}, Branch::Plus, 1e300};
  for (int n : opt.grids) {
    std::vector<Complex> starts;
    if (lens_contains(lens, LensPoint{target[0]})) starts.push_back(target[0]);
    for (const auto& g : detail::lens_starts(lens, n)) starts.push_back(g);
    for (Branch br : {Branch::Plus, Branch::Minus}) {
      for (const auto& g0 : starts) {
        const LensSolution s = detail::newton_from(lens, g0, br, x, target, opt);
        if (s.residual < best.residual) best = s;
        if (s.residual <= opt.converged) {
          found.push_back(s);
          break;
        }
      }
      if (!found.empty() && !opt.collect_alternatives) return found;
    }
    if (!found.empty()) return found;
  }
  if (best.residual <= opt.accept) {
    found.push_back(best);
    return found;
  }
  if (auto t = detail::torus_search(lens, x, target, opt)) found.push_back(*t);
  if (found.empty())
    throw Error(ErrorCode::ConvergenceFailure, "psi_x inversion failed; best slice residual " + std::to_string(best.residual));
  return found;
}

/// Complex geodesic of M_(a, b, 1) through 0 and z != 0, with its certificate.
inline GeodesicCertificate geodesic_through(double a, double b, const TriPoint& z, const InversionOptions& opt = {}) {
  require_in_polydisc(z, "z");
  const Alpha alpha{a, b, 1.0};
  if (std::abs(membership_residual(alpha, z)) > opt.variety_tol) throw Error(ErrorCode::NotOnVariety, "point is not on the variety");
  if (max_modulus(z) == 0.0) throw Error(ErrorCode::DomainError, "target must differ from the origin");

  const auto perm = detail::dominant_last(z);
  const Alpha pa = alpha.permuted(perm);
  const Lens lens(pa[0].real() / pa[2].real(), pa[1].real() / pa[2].real());
  if (!lens.nonempty()) throw Error(ErrorCode::Unsupported, "variety is a retract; the lens family does not apply");
  const TriPoint y{z[static_cast<std::size_t>(perm[0])], z[static_cast<std::size_t>(perm[1])], z[static_cast<std::size_t>(perm[2])]};
  const Complex x = y[2];
  const BiPoint target{y[0] / x, y[1] / x};

  const auto sols = invert_psi_x(lens, x, target, opt);
  GeodesicCertificate cert;
  cert.gamma = sols.front().gamma;
  cert.branch = sols.front().branch;
  cert.alternatives.assign(sols.begin() + 1, sols.end());
  cert.perm = perm;
  cert.disc = sols.front().pair ? phi_gamma(lens, cert.gamma, *sols.front().pair) : phi_gamma(lens, cert.gamma, cert.branch);
  const auto to_slots = TridiscAutomorphism::permutation(perm);
  if (!to_slots.is_identity()) cert.disc.post = to_slots.inverse();
  cert.param_at_target = x;
  const TriPoint hit = cert.disc.tri(x);
  cert.residual = std::max({std::abs(hit[0] - z[0]), std::abs(hit[1] - z[1]), std::abs(hit[2] - z[2])});
  cert.caratheodory_value = c_polydisc(TriPoint{0.0, 0.0, 0.0}, z);
  cert.lempert_value = rho(0.0, x);
  return cert;
}

/// Geodesic through two arbitrary points of a non-retract M_alpha: move z to
/// the origin, transport the variety, normalise, and solve there.
inline GeodesicCertificate geodesic_between(const Alpha& alpha, const TriPoint& z, const TriPoint& w, const InversionOptions& opt = {}) {
  require_in_polydisc(z, "z");
  require_in_polydisc(w, "w");
  const double scale = std::max(1.0, alpha.max_modulus());
  if (std::abs(membership_residual(alpha, z)) > opt.variety_tol * scale || std::abs(membership_residual(alpha, w)) > opt.variety_tol * scale)
    throw Error(ErrorCode::NotOnVariety, "point is not on the variety");
  if (classify(alpha).retract) throw Error(ErrorCode::Unsupported, "variety is a retract; the lens family does not apply");

  const auto move = TridiscAutomorphism::to_origin(z);
  const Alpha beta = transport(alpha, move, opt.variety_tol);
  const NormalForm nf = normalize(beta);
  const TriPoint y = nf.apply(move(w));
  InversionOptions inner = opt;
  inner.variety_tol = std::max(opt.variety_tol, 1e-8);
  GeodesicCertificate cert = geodesic_through(nf.a, nf.b, y, inner);

  TridiscAutomorphism back = move.inverse().compose(TridiscAutomorphism::rotations(nf.rotations).inverse());
  if (cert.disc.post) back = back.compose(*cert.disc.post);
  cert.disc.post = back;
  const TriPoint at0 = cert.disc.tri(0.0), at1 = cert.disc.tri(cert.param_at_target);
  double res = 0;
  for (std::size_t j = 0; j < 3; ++j) res = std::max({res, std::abs(at0[j] - z[j]), std::abs(at1[j] - w[j])});
  cert.residual = res;
  cert.caratheodory_value = c_polydisc(z, w);
  return cert;
}

inline GeodesicCertificate geodesic_through_dab(const DomainDab& d, const BiPoint& w, const InversionOptions& opt = {}) {
  return geodesic_through(d.a, d.b, lift_to_M(d, w), opt);
}

inline GeodesicCertificate geodesic_between_dab(const DomainDab& d, const BiPoint& z, const BiPoint& w, const InversionOptions& opt = {}) {
  GeodesicCertificate cert = geodesic_between(d.alpha(), lift_to_M(d, z), lift_to_M(d, w), opt);
  cert.caratheodory_value = c_dab(d, z, w);
  return cert;
}

// ---------------------------------------------------------------------------
// Desk-scale verification of the Lempert property of D_{a,b}.

struct LempertSample {
  std::uint64_t index = 0;
  BiPoint w{};
  bool pass = false;
  double c_gap = 0;
  double residual = 0;
  int dominant = 0;  // 1-based coordinate of the lifted point placed last
  std::string error;
};

struct LempertReport {
  double a = 0;
  double b = 0;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::uint64_t passes = 0;
  std::uint64_t failures = 0;
  double worst_c_gap = 0;
  double worst_residual = 0;
  std::array<std::uint64_t, 3> dominant_counts{};
  double tol_c_gap = 1e-9;
  double tol_residual = 1e-9;
  std::vector<LempertSample> failed;
};

/// Uniform sample of D_{a,b} by rejection from the bidisc.
inline BiPoint sample_dab_point(const DomainDab& d, CounterRng& rng) {
  for (;;) {
    const BiPoint z{rng.in_disc(), rng.in_disc()};
    if (dab_contains(d, z)) return z;
  }
}

inline LempertSample lempert_check_sample(const DomainDab& d, std::uint64_t seed, std::uint64_t index, double tol_gap,
                                          double tol_residual, const InversionOptions& opt) {
  CounterRng rng(seed, index);
  LempertSample s;
  s.index = index;
  s.w = sample_dab_point(d, rng);
  try {
    const GeodesicCertificate cert = geodesic_through_dab(d, s.w, opt);
    const double c = c_dab(d, {0.0, 0.0}, s.w);
    s.c_gap = std::abs(c - cert.lempert_value);
    s.residual = cert.residual;
    s.dominant = cert.perm[2] + 1;
    s.pass = s.c_gap < tol_gap && s.residual < tol_residual;
  } catch (const Error& e) {
    s.error = e.what();
    s.pass = false;
  }
  return s;
}

/// Samples w in D_{a,b}, builds the geodesic through (0, w) and compares
/// c_{D_{a,b}}(0, w) with the parameter distance. Results do not depend on
/// `workers`.
inline LempertReport lempert_verify(const DomainDab& d, std::uint64_t samples, std::uint64_t seed, unsigned workers = 1,
                                    double tol_gap = 1e-9, double tol_residual = 1e-9, const InversionOptions& opt = {}) {
  if (!d.interesting()) throw Error(ErrorCode::ParameterViolation, "lempert_verify needs |a - b| < 1 < a + b");
  std::vector<LempertSample> results(samples);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(1, samples))));
  auto run = [&](unsigned worker) {
    for (std::uint64_t i = worker; i < samples; i += workers) results[i] = lempert_check_sample(d, seed, i, tol_gap, tol_residual, opt);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(run, k);
  }

  LempertReport rep;
  rep.a = d.a;
  rep.b = d.b;
  rep.seed = seed;
  rep.samples = samples;
  rep.tol_c_gap = tol_gap;
  rep.tol_residual = tol_residual;
  for (const auto& s : results) {
    if (s.pass) {
      ++rep.passes;
    } else {
      ++rep.failures;
      rep.failed.push_back(s);
    }
    if (s.error.empty()) {
      rep.worst_c_gap = std::max(rep.worst_c_gap, s.c_gap);
      rep.worst_residual = std::max(rep.worst_residual, s.residual);
      ++rep.dominant_counts[static_cast<std::size_t>(s.dominant - 1)];
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Finite universal sets for the Carathéodory problem.

using PointValue = std::function<Complex(std::span<const Complex>)>;
using PointGradient = std::function<std::vector<Complex>(std::span<const Complex>)>;

struct UniversalMember {
  std::string name;
  PointValue value;
  PointGradient gradient;
};

struct UniversalSet {
  std::string domain;
  std::vector<UniversalMember> members;
};

/// {z -> z1, z -> z2, F_{a,b}}.
inline UniversalSet dab_universal_set(const DomainDab& d) {
  UniversalSet u;
  u.domain = "dab";
  u.members.push_back({"z1", [](std::span<const Complex> z) { return z[0]; },
                       [](std::span<const Complex>) { return std::vector<Complex>{1.0, 0.0}; }});
  u.members.push_back({"z2", [](std::span<const Complex> z) { return z[1]; },
                       [](std::span<const Complex>) { return std::vector<Complex>{0.0, 1.0}; }});
  u.members.push_back({"F_ab", [d](std::span<const Complex> z) { return dab_function(d, {z[0], z[1]}); },
                       [d](std::span<const Complex> z) {
                         const auto g = dab_function_gradient(d, {z[0], z[1]});
                         return std::vector<Complex>{g[0], g[1]};
                       }});
  return u;
}

inline UniversalSet polydisc_projections(int n) {
  UniversalSet u;
  u.domain = "polydisc";
  for (int j = 0; j < n; ++j) {
    u.members.push_back({"z" + std::to_string(j + 1), [j](std::span<const Complex> z) { return z[static_cast<std::size_t>(j)]; },
                         [j, n](std::span<const Complex>) {
                           std::vector<Complex> g(static_cast<std::size_t>(n), 0.0);
                           g[static_cast<std::size_t>(j)] = 1.0;
                           return g;
                         }});
  }
  return u;
}

/// The singleton {identity} on the unit disc.
inline UniversalSet disc_identity_set() {
  UniversalSet u = polydisc_projections(1);
  u.domain = "disc";
  u.members[0].name = "identity";
  return u;
}

/// m o f; stays inside the disc and has the same extremal values.
inline UniversalMember post_compose(const UniversalMember& f, const MobiusMap& m) {
  return {"mobius(" + f.name + ")", [f, m](std::span<const Complex> z) { return m(f.value(z)); },
          [f, m](std::span<const Complex> z) {
            const Complex scale = m.derivative(f.value(z));
            auto g = f.gradient(z);
            for (auto& c : g) c *= scale;
            return g;
          }};
}

namespace detail {

inline Complex member_value(const UniversalMember& f, std::span<const Complex> z) {
  const Complex v = f.value(z);
  if (!is_finite(v) || std::abs(v) >= 1.0) throw Error(ErrorCode::EvaluationOutOfDisc, "member " + f.name + " leaves the unit disc");
  return v;
}

}  // namespace detail

struct EmbedResult {
  std::vector<std::vector<Complex>> images;
  bool injective = true;
  std::vector<std::pair<std::size_t, std::size_t>> collisions;
};

inline EmbedResult universal_embed(const UniversalSet& u, const std::vector<std::vector<Complex>>& points, double collision_tol = 1e-14) {
  EmbedResult out;
  for (const auto& p : points) {
    std::vector<Complex> img;
    for (const auto& f : u.members) img.push_back(detail::member_value(f, p));
    out.images.push_back(std::move(img));
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double dist_img = 0, dist_pts = 0;
      for (std::size_t k = 0; k < out.images[i].size(); ++k) dist_img = std::max(dist_img, std::abs(out.images[i][k] - out.images[j][k]));
      for (std::size_t k = 0; k < points[i].size(); ++k) dist_pts = std::max(dist_pts, std::abs(points[i][k] - points[j][k]));
      if (dist_img <= collision_tol && dist_pts > collision_tol) {
        out.injective = false;
        out.collisions.emplace_back(i, j);
      }
    }
  return out;
}

/// max_j rho(f_j(z), f_j(w)).
inline double universal_c(const UniversalSet& u, std::span<const Complex> z, std::span<const Complex> w) {
  double best = 0;
  for (const auto& f : u.members) best = std::max(best, rho(detail::member_value(f, z), detail::member_value(f, w)));
  return best;
}

/// max_j gamma_D(f_j(z); f_j'(z) X).
inline double universal_gamma(const UniversalSet& u, std::span<const Complex> z, std::span<const Complex> x) {
  double best = 0;
  for (const auto& f : u.members) {
    const auto g = f.gradient(z);
    Complex dx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) dx += g.at(k) * x[k];
    best = std::max(best, gamma_disc(detail::member_value(f, z), dx));
  }
  return best;
}

// ---------------------------------------------------------------------------
// kappa at the origin: explicit discs against the universal set.

struct KappaCertificate {
  double formula = 0;      // max{|X1|, |X2|, |a X1 + b X2|}
  double upper_bound = 0;  // |t| for a geodesic f with t f'(0) = X
  double lower_bound = 0;  // universal_gamma with the three-member set
  double derivative_residual = 0;
  AnalyticDisc disc;
};

inline KappaCertificate kappa_dab_certificate(const DomainDab& d, const BiPoint& x) {
  if (!d.interesting()) throw Error(ErrorCode::ParameterViolation, "kappa certificate needs |a - b| < 1 < a + b");
  const TriPoint lifted{x[0], x[1], -(d.a * x[0] + d.b * x[1])};
  if (max_modulus(lifted) == 0.0) return {};
  const auto perm = detail::dominant_last(lifted);
  const Alpha pa = d.alpha().permuted(perm);
  const Lens lens(pa[0].real() / pa[2].real(), pa[1].real() / pa[2].real());
  const TriPoint y{lifted[static_cast<std::size_t>(perm[0])], lifted[static_cast<std::size_t>(perm[1])],
                   lifted[static_cast<std::size_t>(perm[2])]};
  const Complex t = y[2];
  const LensPoint p{y[0] / t};

  KappaCertificate cert;
  cert.formula = kappa_dab_origin(d, x);
  cert.disc = phi_gamma(lens, p, Branch::Plus);
  const auto to_slots = TridiscAutomorphism::permutation(perm);
  if (!to_slots.is_identity()) cert.disc.post = to_slots.inverse();
  // f'(0) in original coordinates: the permutation is linear.
  const auto raw = cert.disc.raw_derivative(0.0);
  TriPoint deriv{};
  for (std::size_t i = 0; i < 3; ++i) deriv[static_cast<std::size_t>(perm[i])] = raw[i];
  for (std::size_t j = 0; j < 3; ++j) cert.derivative_residual = std::max(cert.derivative_residual, std::abs(t * deriv[j] - lifted[j]));
  cert.upper_bound = std::abs(t);
  const std::array<Complex, 2> origin{0.0, 0.0};
  cert.lower_bound = universal_gamma(dab_universal_set(d), origin, x);
  return cert;
}

// ---------------------------------------------------------------------------
// Non-linear-convexity witness.

struct ConvexityQuadratic {
  Complex root1{0.0};
  Complex root2{0.0};
  bool all_unimodular = false;
};

/// Roots of b w^2 - (b^2 + 1 - a^2) w + b.
inline ConvexityQuadratic linear_convexity_quadratic(const DomainDab& d, double tol = 1e-10) {
  const double a = d.a, b = d.b;
  const double p = b * b + 1.0 - a * a;
  const Complex disc = p * p - 4.0 * b * b;
  const Complex sq = std::sqrt(disc);
  // Avoid cancellation: take the root with the larger modulus first.
  const Complex big = (p >= 0 ? (p + sq) : (p - sq)) / (2.0 * b);
  const Complex small = big == 0.0 ? Complex(0.0) : 1.0 / big;  // product of roots is 1
  ConvexityQuadratic out{big, small, false};
  out.all_unimodular = std::abs(std::abs(big) - 1.0) <= tol && std::abs(std::abs(small) - 1.0) <= tol;
  return out;
}

}  // namespace carathset
