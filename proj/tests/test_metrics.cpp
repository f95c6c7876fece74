#include <gtest/gtest.h>

#include "carathset/metrics.hpp"
#include "carathset/oracle.hpp"
#include "carathset/random.hpp"

using namespace carathset;

namespace {

const DomainDab kD(0.8, 0.8);

template <class F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

std::vector<Complex> vec(const BiPoint& z) { return {z[0], z[1]}; }

// Lenses wide enough to hold points with well separated solutions.
bool roomy(const Lens& lens) { return std::min(1.0 - std::abs(lens.a - lens.b), lens.a + lens.b - 1.0) > 0.05; }

LensPoint interior_point(const Lens& lens, CounterRng& rng, double gap = 1e-3) {
  for (;;) {
    const LensPoint p = sample_lens_point(lens, rng);
    const LinkLengths k = link_lengths(lens, p);
    if (std::min(k.lower_gap(), k.upper_gap()) > gap) return p;
  }
}

}  // namespace

TEST(CPolydisc, Examples) {
  const TriPoint o{0.0, 0.0, 0.0};
  EXPECT_EQ(c_polydisc(o, o), 0.0);
  EXPECT_NEAR(c_polydisc(o, TriPoint{0.5, -2.0 / 3.0, 0.0}), std::atanh(2.0 / 3.0), 1e-15);
  const TriPoint z{Complex(0.1, 0.2), -0.3, Complex(0.0, 0.6)}, w{0.4, Complex(0.2, 0.2), -0.1};
  const TriPoint zp{z[2], z[0], z[1]}, wp{w[2], w[0], w[1]};
  EXPECT_EQ(c_polydisc(z, w), c_polydisc(zp, wp));
  EXPECT_EQ(c_polydisc(z, w), c_polydisc(w, z));
  EXPECT_THROW(c_polydisc(z, TriPoint{1.0, 0.0, 0.0}), Error);
}

TEST(CDab, Examples) {
  EXPECT_EQ(c_dab(kD, {0.0, 0.0}, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(c_dab(kD, {0.0, 0.0}, {0.5, 0.0}), std::atanh(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(c_dab(kD, {0.0, 0.0}, {0.5, 0.0}), 0.8047189562170503, 1e-15);
  expect_code(ErrorCode::NotInDomain, [] { c_dab(kD, {0.0, 0.0}, {0.99, 0.99}); });
}

TEST(CDab, BoundsCoordinateDistance) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(61, i);
    const BiPoint z = sample_dab_point(kD, rng), w = sample_dab_point(kD, rng);
    const double c = c_dab(kD, z, w);
    EXPECT_GE(c, rho(z[0], w[0]));
    EXPECT_GE(c, rho(z[1], w[1]));
  }
}

TEST(Kappa, Examples) {
  EXPECT_EQ(kappa_dab_origin(kD, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(kappa_dab_origin(DomainDab(0.8, 0.9), {1.0, -1.0}), 1.0, 1e-15);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CounterRng rng(62, i);
    const BiPoint x{rng.in_disc(3.0), rng.in_disc(3.0)};
    const Complex t = rng.in_disc(5.0);
    EXPECT_NEAR(kappa_dab_origin(kD, {t * x[0], t * x[1]}), std::abs(t) * kappa_dab_origin(kD, x), 1e-13);
  }
}

TEST(Indicatrix, Examples) {
  EXPECT_TRUE(indicatrix_membership(kD, {0.0, 0.0}));
  EXPECT_TRUE(indicatrix_membership(kD, {0.9, -0.9}));
  EXPECT_FALSE(indicatrix_membership(kD, {1.0, 0.0}));
  EXPECT_FALSE(indicatrix_membership(kD, {0.7, 0.7}));  // |a X1 + b X2| = 1.12
}

TEST(CMOrigin, Examples) {
  const NormalForm nf = normalize(kD.alpha());
  EXPECT_EQ(c_M_origin(nf, {0.0, 0.0, 0.0}), 0.0);
  const Lens lens(0.8, 0.8);
  for (Branch br : {Branch::Plus, Branch::Minus}) {
    const TriPoint z = phi_gamma(lens, {-0.625}, br).tri(0.5);
    EXPECT_NEAR(c_M_origin(nf, z), std::atanh(0.5), 1e-15);
  }
  expect_code(ErrorCode::NotOnVariety, [&] { c_M_origin(nf, {0.5, 0.5, 0.5}); });
}

TEST(CMOrigin, PermutationCovarianceAndRestriction) {
  const DomainDab d(0.6, 0.95);
  const NormalForm nf = normalize(d.alpha()), swapped = normalize(Alpha(0.95, 0.6, 1.0));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(63, i);
    const TriPoint z = lift_to_M(d, sample_dab_point(d, rng));
    const double c = c_M_origin(nf, z);
    EXPECT_EQ(c, c_M_origin(swapped, {z[1], z[0], z[2]}));
    EXPECT_EQ(c, c_polydisc(TriPoint{0.0, 0.0, 0.0}, z));
  }
}

TEST(PsiX, ForwardProperties) {
  const Lens lens(0.8, 0.8);
  for (std::uint64_t i = 0; i < 500; ++i) {
    CounterRng rng(64, i);
    const LensPoint p = interior_point(lens, rng);
    const Complex x = rng.in_disc(0.95);
    for (Branch br : {Branch::Plus, Branch::Minus}) {
      const BiPoint l = psi_x_forward(lens, p, br, x);
      EXPECT_LT(std::abs(membership_residual(lens.alpha(), {l[0] * x, l[1] * x, x})), 1e-14);
      const BiPoint l0 = psi_x_forward(lens, p, br, 1e-9);
      EXPECT_NEAR(std::abs(l0[0] - p.gamma1), 0.0, 1e-8);
      EXPECT_NEAR(std::abs(l0[1] - p.gamma2(lens)), 0.0, 1e-8);
    }
  }
  // near the part of the boundary where |gamma1| -> 1 the first slot is pinned
  const LensPoint edge{-(1.0 - 1e-7)};
  ASSERT_TRUE(lens_contains(lens, edge));
  for (Branch br : {Branch::Plus, Branch::Minus}) {
    const BiPoint l = psi_x_forward(lens, edge, br, 0.5);
    EXPECT_NEAR(std::abs(l[0] - edge.gamma1), 0.0, 1e-6);
  }
  expect_code(ErrorCode::DomainError, [&] { psi_x_forward(lens, {-0.625}, Branch::Plus, 0.0); });
}

TEST(GeodesicThrough, RoundTrip) {
  int same_gamma = 0;
  double worst_res = 0, worst_gap = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(65, i);
    const Lens lens(rng.uniform(0.3, 1.8), rng.uniform(0.3, 1.8));
    if (!roomy(lens)) continue;
    const LensPoint p = interior_point(lens, rng);
    const Branch br = rng.uniform() < 0.5 ? Branch::Plus : Branch::Minus;
    const Complex x = rng.in_disc(0.95);
    const TriPoint z = phi_gamma(lens, p, br).tri(x);
    GeodesicCertificate cert;
    try {
      cert = geodesic_through(lens.a, lens.b, z);
    } catch (const Error& e) {
      ADD_FAILURE() << "sample " << i << ": " << e.what();
      continue;
    }
    worst_res = std::max(worst_res, cert.residual);
    worst_gap = std::max(worst_gap, std::abs(cert.caratheodory_value - cert.lempert_value));
    EXPECT_NEAR(cert.lempert_value, rho(0.0, z[2]), 1e-15);
    if (std::abs(cert.gamma.gamma1 - p.gamma1) < 1e-8) ++same_gamma;
  }
  EXPECT_LT(worst_res, 1e-9);
  EXPECT_LT(worst_gap, 1e-12);
  std::cout << "recovered the generating gamma in " << same_gamma << " cases\n";
}

TEST(GeodesicThrough, SymmetricTargetHasMirroredGeodesics) {
  // on a = b the slice z1 = z2 = s gives z3 = (s^2 - 2 a s) / (1 - 2 a s)
  const double a = 0.8, s = -0.3;
  const Lens lens(a, a);
  const Complex x = (s * s - 2.0 * a * s) / (1.0 - 2.0 * a * s);
  const TriPoint z{s, s, x};
  ASSERT_LT(std::abs(membership_residual({a, a, 1.0}, z)), 1e-15);
  const GeodesicCertificate cert = geodesic_through(a, a, z);
  EXPECT_LT(cert.residual, 1e-9);
  EXPECT_NEAR(cert.caratheodory_value, rho(0.0, x), 1e-15);
  EXPECT_NEAR(cert.lempert_value, rho(0.0, x), 1e-15);
  // The symmetric gamma1 = gamma2 has eta = conj(omega) with omega not real, so its
  // disc cannot have equal first coordinates at lambda = x: the geodesic is not symmetric.
  const Complex g1 = cert.gamma.gamma1, g2 = cert.gamma.gamma2(lens);
  EXPECT_GT(std::abs(g1 - g2), 1e-3);
  // Swapping z1 and z2 preserves M and z, so the mirrored gamma gives a second geodesic.
  double best = 1e300;
  for (Branch br : {Branch::Plus, Branch::Minus}) {
    const TriPoint hit = phi_gamma(lens, {g2}, br).tri(x);
    best = std::min(best, std::max({std::abs(hit[0] - z[0]), std::abs(hit[1] - z[1]), std::abs(hit[2] - z[2])}));
  }
  EXPECT_LT(best, 1e-9);
}

TEST(GeodesicThrough, DominantSlotAndErrors) {
  // F-coordinate dominant: (0.5, 0) lifts to (0.5, 0, -2/3)
  const GeodesicCertificate cert = geodesic_through_dab(kD, {0.5, 0.0});
  EXPECT_EQ(cert.perm[2], 2);
  EXPECT_NEAR(cert.lempert_value, std::atanh(2.0 / 3.0), 1e-12);
  // first coordinate dominant
  const GeodesicCertificate c1 = geodesic_through_dab(kD, {0.6, -0.3});
  EXPECT_EQ(c1.perm[2], 0);
  EXPECT_LT(c1.residual, 1e-9);
  EXPECT_EQ(detail::dominant_last({0.5, 0.5, 0.1}), (std::array<int, 3>{0, 2, 1}));
  expect_code(ErrorCode::NotOnVariety, [] { geodesic_through(0.8, 0.8, {0.5, 0.5, 0.5}); });
  expect_code(ErrorCode::Unsupported, [] { geodesic_through(0.2, 0.2, {0.3, 0.0, graph_value({0.2, 0.2, 1.0}, 0.3, 0.0)}); });
}

TEST(GeodesicThrough, AlternativesAreGenuinePreimages) {
  InversionOptions opt;
  opt.collect_alternatives = true;
  int with_alt = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    CounterRng rng(66, i);
    const TriPoint z = lift_to_M(kD, sample_dab_point(kD, rng));
    const GeodesicCertificate cert = geodesic_through(kD.a, kD.b, z, opt);
    for (const auto& alt : cert.alternatives) {
      ++with_alt;
      EXPECT_LE(alt.residual, opt.accept);
      const auto perm = cert.perm;
      const Alpha pa = kD.alpha().permuted(perm);
      const Lens lens(pa[0].real() / pa[2].real(), pa[1].real() / pa[2].real());
      const TriPoint hit = phi_gamma(lens, alt.gamma, alt.branch).tri(z[static_cast<std::size_t>(perm[2])]);
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(hit[j] - z[static_cast<std::size_t>(perm[j])]), 0.0, 1e-9);
    }
  }
  std::cout << "alternatives recorded: " << with_alt << "\n";
}

TEST(GeodesicBetween, GeneralPairs) {
  double worst_res = 0, worst_gap = 0;
  int done = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(67, i);
    const DomainDab d(rng.uniform(0.5, 1.2), rng.uniform(0.5, 1.2));
    if (!d.interesting()) continue;
    const BiPoint z = sample_dab_point(d, rng), w = sample_dab_point(d, rng);
    if (max_modulus(lift_to_M(d, z)) > 0.97 || max_modulus(lift_to_M(d, w)) > 0.97) continue;
    GeodesicCertificate cert;
    try {
      cert = geodesic_between_dab(d, z, w);
    } catch (const Error& e) {
      ADD_FAILURE() << "sample " << i << ": " << e.what();
      continue;
    }
    ++done;
    worst_res = std::max(worst_res, cert.residual);
    worst_gap = std::max(worst_gap, std::abs(cert.caratheodory_value - cert.lempert_value));
    // sandwich: the disc's parameter distance bounds c from above
    const TriPoint lz = lift_to_M(d, z), lw = lift_to_M(d, w);
    const double upper = oracle::lempert_upper_bound(cert.disc, std::vector<Complex>(lz.begin(), lz.end()), 0.0,
                                                     std::vector<Complex>(lw.begin(), lw.end()), cert.param_at_target, 1e-9);
    EXPECT_LE(cert.caratheodory_value, upper + 1e-9);
    EXPECT_NEAR(cert.caratheodory_value, upper, 1e-9);
  }
  EXPECT_GT(done, 100);
  EXPECT_LT(worst_res, 1e-9);
  EXPECT_LT(worst_gap, 1e-9);
}

TEST(GeodesicBetween, RejectsRetractAndOffVariety) {
  expect_code(ErrorCode::Unsupported, [] { geodesic_between({1.0, 1.0, 3.0}, {0.0, 0.0, 0.0}, {0.1, 0.1, graph_value({1.0, 1.0, 3.0}, 0.1, 0.1)}); });
  expect_code(ErrorCode::NotOnVariety, [] { geodesic_between(kD.alpha(), {0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}); });
}

TEST(LempertVerify, AllPassAndDeterministic) {
  const LempertReport r1 = lempert_verify(kD, 200, 7, 1);
  EXPECT_EQ(r1.passes, 200u);
  EXPECT_EQ(r1.failures, 0u);
  EXPECT_LT(r1.worst_c_gap, 1e-9);
  EXPECT_LT(r1.worst_residual, 1e-9);
  EXPECT_EQ(r1.dominant_counts[0] + r1.dominant_counts[1] + r1.dominant_counts[2], 200u);
  EXPECT_GT(r1.dominant_counts[2], 0u);
  const LempertReport r3 = lempert_verify(kD, 200, 7, 3);
  EXPECT_EQ(r3.passes, r1.passes);
  EXPECT_EQ(r3.worst_c_gap, r1.worst_c_gap);
  EXPECT_EQ(r3.worst_residual, r1.worst_residual);
  EXPECT_EQ(r3.dominant_counts, r1.dominant_counts);
  expect_code(ErrorCode::ParameterViolation, [] { lempert_verify(DomainDab(0.3, 0.3), 10, 1); });
}

TEST(LempertVerify, FDominantPointUsesThePermutation) {
  const GeodesicCertificate cert = geodesic_through_dab(kD, {0.5, 0.0});
  EXPECT_EQ(cert.perm[2], 2);
  EXPECT_NEAR(c_dab(kD, {0.0, 0.0}, {0.5, 0.0}), cert.lempert_value, 1e-12);
  EXPECT_LT(cert.residual, 1e-9);
}

TEST(Universal, EmbedExamples) {
  const UniversalSet u = dab_universal_set(kD);
  const auto e = universal_embed(u, {{0.0, 0.0}, {0.5, 0.0}});
  for (const Complex c : e.images[0]) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(e.images[1][0], 0.5);
  EXPECT_EQ(e.images[1][1], 0.0);
  EXPECT_NEAR(std::abs(e.images[1][2] + 2.0 / 3.0), 0.0, 1e-15);
  expect_code(ErrorCode::EvaluationOutOfDisc, [&] { universal_embed(u, {{0.9, 0.9}}); });

  std::vector<std::vector<Complex>> pts;
  for (std::uint64_t i = 0; i < 300; ++i) {
    CounterRng rng(68, i);
    pts.push_back(vec(sample_dab_point(kD, rng)));
  }
  const auto big = universal_embed(u, pts);
  EXPECT_TRUE(big.injective);
  EXPECT_TRUE(big.collisions.empty());
}

TEST(Universal, CMatchesClosedForm) {
  for (const DomainDab d : {DomainDab(0.8, 0.8), DomainDab(0.6, 0.95), DomainDab(0.5, 1.3)}) {
    const UniversalSet u = dab_universal_set(d);
    for (std::uint64_t i = 0; i < 1000; ++i) {
      CounterRng rng(69, i);
      const BiPoint z = sample_dab_point(d, rng), w = sample_dab_point(d, rng);
      EXPECT_EQ(universal_c(u, vec(z), vec(w)), c_dab(d, z, w));
    }
  }
  const UniversalSet id = disc_identity_set();
  for (std::uint64_t i = 0; i < 100; ++i) {
    CounterRng rng(70, i);
    const Complex z = rng.in_disc(), w = rng.in_disc();
    EXPECT_EQ(universal_c(id, std::vector<Complex>{z}, std::vector<Complex>{w}), rho(z, w));
  }
}

TEST(Universal, GammaAtOriginIsKappa) {
  for (const DomainDab d : {DomainDab(0.8, 0.8), DomainDab(0.6, 0.95), DomainDab(0.5, 1.3)}) {
    const UniversalSet u = dab_universal_set(d);
    for (std::uint64_t i = 0; i < 1000; ++i) {
      CounterRng rng(71, i);
      const BiPoint x{rng.in_disc(2.0), rng.in_disc(2.0)};
      EXPECT_NEAR(universal_gamma(u, std::vector<Complex>{0.0, 0.0}, vec(x)), kappa_dab_origin(d, x), 1e-12);
    }
  }
}

TEST(Universal, GradientsMatchFiniteDifferences) {
  const UniversalSet u = dab_universal_set(DomainDab(0.6, 0.95));
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(72, i);
    const BiPoint z = sample_dab_point(DomainDab(0.6, 0.95), rng);
    const std::vector<Complex> dir{rng.in_disc(), rng.in_disc()};
    for (const auto& f : u.members) {
      const auto g = f.gradient(vec(z));
      const Complex analytic = g[0] * dir[0] + g[1] * dir[1];
      const Complex fd = oracle::finite_diff_derivative(f.value, vec(z), dir, 1e-6);
      EXPECT_LE(std::abs(analytic - fd), 1e-6 * std::max(1.0, std::abs(analytic))) << f.name;
    }
  }
}

TEST(Universal, SupersetDoesNotIncreaseC) {
  const UniversalSet base = dab_universal_set(kD);
  for (std::uint64_t i = 0; i < 300; ++i) {
    CounterRng rng(73, i);
    UniversalSet bigger = base;
    for (int k = 0; k < 3; ++k)
      bigger.members.push_back(post_compose(base.members[static_cast<std::size_t>(k)], MobiusMap(rng.in_disc(0.9), rng.unimodular())));
    const BiPoint z = sample_dab_point(kD, rng), w = sample_dab_point(kD, rng);
    EXPECT_NEAR(universal_c(bigger, vec(z), vec(w)), universal_c(base, vec(z), vec(w)), 1e-12);
    const std::vector<Complex> x{rng.in_disc(), rng.in_disc()};
    const double g = universal_gamma(base, vec(z), x);
    EXPECT_NEAR(universal_gamma(bigger, vec(z), x), g, 1e-12 * std::max(1.0, g));
  }
}

TEST(Universal, OracleLowerBoundAgrees) {
  const UniversalSet u = dab_universal_set(kD);
  std::vector<oracle::ScalarMap> family;
  for (const auto& f : u.members) family.push_back(f.value);
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(74, i);
    const BiPoint z = sample_dab_point(kD, rng), w = sample_dab_point(kD, rng);
    const auto lb = oracle::caratheodory_lower_bound(family, vec(z), vec(w));
    EXPECT_TRUE(lb.out_of_disc.empty());
    EXPECT_NEAR(lb.value, universal_c(u, vec(z), vec(w)), 1e-12);
  }
}

TEST(KappaCertificate, DiscsMeetTheUniversalBound) {
  double worst = 0;
  for (const DomainDab d : {DomainDab(0.8, 0.8), DomainDab(0.6, 0.95), DomainDab(0.5, 1.3), DomainDab(1.4, 0.9)}) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      CounterRng rng(75, i);
      const BiPoint x{rng.in_disc(2.0), rng.in_disc(2.0)};
      KappaCertificate k;
      try {
        k = kappa_dab_certificate(d, x);
      } catch (const Error& e) {
        // directions on the lens boundary (ties in the max) are tangent
        EXPECT_TRUE(e.code() == ErrorCode::Tangent || e.code() == ErrorCode::Infeasible) << e.what();
        continue;
      }
      worst = std::max({worst, std::abs(k.upper_bound - k.lower_bound), std::abs(k.upper_bound - k.formula)});
      EXPECT_LT(k.derivative_residual, 1e-12);
    }
  }
  EXPECT_LT(worst, 1e-10);
  const KappaCertificate zero = kappa_dab_certificate(kD, {0.0, 0.0});
  EXPECT_EQ(zero.formula, 0.0);
  EXPECT_EQ(zero.upper_bound, 0.0);
}

TEST(Convexity, Examples) {
  const ConvexityQuadratic q = linear_convexity_quadratic(kD);
  EXPECT_TRUE(q.all_unimodular);
  const double im = std::sqrt(0.609375);
  for (const Complex r : {q.root1, q.root2}) {
    EXPECT_NEAR(r.real(), 0.625, 1e-12);
    EXPECT_NEAR(std::abs(r.imag()), im, 1e-12);
  }
  // oracle roots of 0.8 w^2 - w + 0.8
  for (const Complex r : oracle::quadratic_roots(0.8, -1.0, 0.8)) {
    EXPECT_LT(std::min(std::abs(r - q.root1), std::abs(r - q.root2)), 1e-12);
  }
  EXPECT_FALSE(linear_convexity_quadratic(DomainDab(0.3, 0.3)).all_unimodular);
}

TEST(Convexity, VietaAndInversionSymmetry) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(76, i);
    const DomainDab d(rng.uniform(0.05, 3.0), rng.uniform(0.05, 3.0));
    const ConvexityQuadratic q = linear_convexity_quadratic(d);
    EXPECT_NEAR(std::abs(q.root1 * q.root2 - 1.0), 0.0, 1e-12);
    const double p = d.b * d.b + 1.0 - d.a * d.a;
    for (const Complex r : {q.root1, q.root2}) EXPECT_LT(std::abs(d.b * r * r - p * r + d.b), 1e-10 * (1.0 + std::norm(r)) * (1.0 + std::abs(p)));
    if (d.interesting()) {
      EXPECT_TRUE(q.all_unimodular) << d.a << " " << d.b;
      // roots are fixed by w -> 1 / conj(w)
      for (const Complex r : {q.root1, q.root2}) EXPECT_NEAR(std::abs(1.0 / std::conj(r) - r), 0.0, 1e-12);
    } else if (d.a + d.b < 1.0 - 1e-6 || std::abs(d.a - d.b) > 1.0 + 1e-6) {
      EXPECT_FALSE(q.all_unimodular) << d.a << " " << d.b;
    }
  }
}
