#include <gtest/gtest.h>

#include "carathset/ball.hpp"
#include "carathset/oracle.hpp"
#include "carathset/random.hpp"

using namespace carathset;

namespace {

template <class F>
void expect_code(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

BallPoint random_ball(CounterRng& rng, int n, double radius = 1.0) {
  const auto v = rng.in_ball(n, radius);
  BallPoint p(n);
  for (int j = 0; j < n; ++j) p[j] = v[static_cast<std::size_t>(j)];
  return p;
}

BallPoint random_sphere(CounterRng& rng, int n) {
  const auto v = rng.on_sphere(n);
  BallPoint p(n);
  for (int j = 0; j < n; ++j) p[j] = v[static_cast<std::size_t>(j)];
  return p;
}

std::vector<Complex> vec(const BallPoint& p) { return {p.data(), p.data() + p.size()}; }

// Points of l inside the ball: minimal point plus a multiple of the direction.
BallPoint on_line(const ComplexLine& l, CounterRng& rng) {
  const BallPoint a = minimal_norm_point(l);
  const double r = std::sqrt(1.0 - a.squaredNorm());
  return a + rng.in_disc(0.98 * r) * l.direction;
}

ComplexLine random_line(CounterRng& rng, int n) {
  for (;;) {
    ComplexLine l(random_ball(rng, n, 1.2), random_sphere(rng, n));
    const BallPoint foot = l.base - l.direction.dot(l.base) * l.direction;
    if (foot.norm() < 0.95) return l;
  }
}

}  // namespace

TEST(BallAutomorphism, Examples) {
  const BallPoint a = ball_point({Complex(0.3, 0.1), Complex(-0.2, 0.4)});
  EXPECT_LT(ball_automorphism(a, a).norm(), 1e-15);
  EXPECT_LT((ball_automorphism(a, BallPoint::Zero(2)) - a).norm(), 1e-15);
  const BallPoint z = ball_point({0.1, Complex(0.2, -0.5)});
  EXPECT_EQ(ball_automorphism(BallPoint::Zero(2), z), z);
  expect_code(ErrorCode::DomainError, [] { ball_automorphism(ball_point({1.0, 0.0}), ball_point({0.0, 0.0})); });
}

TEST(BallAutomorphism, InvolutionInB2AndB3) {
  // Rounding in w = Phi_a(z) is amplified by roughly 1 / (1 - |a|^2) on the way
  // back, so the absolute bound is checked where that factor stays below 50 and
  // a scaled bound on the whole ball.
  for (int n : {2, 3}) {
    double worst = 0, worst_scaled = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      CounterRng rng(81, i);
      const BallPoint a = random_ball(rng, n), z = random_ball(rng, n);
      const BallPoint w = ball_automorphism(a, z);
      EXPECT_LT(w.squaredNorm(), 1.0);
      const double err = (ball_automorphism(a, w) - z).norm();
      worst_scaled = std::max(worst_scaled, err * (1.0 - a.squaredNorm()));
      if (a.norm() < 0.99) worst = std::max(worst, err);
    }
    EXPECT_LT(worst, 1e-12) << "n = " << n;
    EXPECT_LT(worst_scaled, 1e-14) << "n = " << n;
  }
}

TEST(MinimalNormPoint, Examples) {
  const ComplexLine through0(BallPoint::Zero(2), ball_point({1.0, Complex(0.0, 1.0)}));
  EXPECT_LT(minimal_norm_point(through0).norm(), 1e-16);
  const ComplexLine l(ball_point({0.5, 0.0}), ball_point({0.0, 1.0}));
  EXPECT_LT((minimal_norm_point(l) - ball_point({0.5, 0.0})).norm(), 1e-16);
  expect_code(ErrorCode::NoIntersection, [] { minimal_norm_point(ComplexLine(ball_point({2.0, 0.0}), ball_point({0.0, 1.0}))); });
  expect_code(ErrorCode::DomainError, [] { ComplexLine(ball_point({0.0, 0.0}), ball_point({0.0, 0.0})); });
}

TEST(MinimalNormPoint, IsTheOrthogonalFoot) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(82, i);
    const ComplexLine l = random_line(rng, 3);
    const BallPoint a = minimal_norm_point(l);
    EXPECT_LT(std::abs(l.direction.dot(a)), 1e-12);
    // a lies on the line and no sampled point of the line is shorter
    const Complex shift = l.direction.dot(a - l.base);
    EXPECT_LT((l.at(shift) - a).norm(), 1e-12);
    for (int k = 0; k < 10; ++k) EXPECT_GE(l.at(shift + rng.in_disc(0.5)).norm(), a.norm() - 1e-15);
  }
}

TEST(PsiL, CoordinateAxis) {
  const BallExtremal e = psi_l(ComplexLine(BallPoint::Zero(2), ball_point({1.0, 0.0})));
  for (std::uint64_t i = 0; i < 100; ++i) {
    CounterRng rng(83, i);
    const BallPoint z = random_ball(rng, 2);
    EXPECT_NEAR(std::abs(e(z)), std::abs(z[0]), 1e-15);
  }
}

TEST(PsiL, ExtremalCertificate) {
  double worst = 0;
  for (int n : {2, 3}) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      CounterRng rng(84, i);
      const ComplexLine l = random_line(rng, n);
      const BallExtremal e = psi_l(l);
      const BallPoint p = on_line(l, rng), q = on_line(l, rng);
      worst = std::max(worst, std::abs(rho(e(p), e(q)) - ball_distance(p, q)));
      // |Psi_l| = 1 on the boundary points of the line
      const BallPoint a = minimal_norm_point(l);
      const BallPoint edge = a + std::sqrt(1.0 - a.squaredNorm()) * rng.unimodular() * l.direction;
      const BallPoint m = e.unitary * ball_automorphism(a, (edge * (1.0 - 1e-12)).eval());
      EXPECT_NEAR(std::abs(m[0]), 1.0, 1e-9);
      // the unitary is unitary
      EXPECT_LT((e.unitary * e.unitary.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-12);
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(PsiL, MapsTheBallIntoTheDisc) {
  CounterRng pick(85, 0);
  const BallExtremal e = psi_l(random_line(pick, 2));
  for (std::uint64_t i = 0; i < 10000; ++i) {
    CounterRng rng(86, i);
    EXPECT_LT(std::abs(e(random_ball(rng, 2))), 1.0);
  }
}

TEST(UniversalB2, Members) {
  const UniversalMember lin = universal_member_linear(1.0, 0.0);
  EXPECT_EQ(lin.value(std::vector<Complex>{Complex(0.3, 0.1), 0.2}), Complex(0.3, 0.1));
  expect_code(ErrorCode::ParameterViolation, [] { universal_member_linear(0.5, 0.5); });
  expect_code(ErrorCode::ParameterViolation, [] { universal_member_linear(-0.6, 0.8); });
  expect_code(ErrorCode::ParameterViolation, [] { universal_member_B2(0.0, 0.0); });
  expect_code(ErrorCode::ParameterViolation, [] { universal_member_B2(0.8, 0.6); });

  for (std::uint64_t i = 0; i < 20; ++i) {
    CounterRng rng(87, i);
    const BallPoint a = random_ball(rng, 2);
    const UniversalMember f = universal_member_B2(a[0], a[1]);
    const double t = rng.uniform(0.0, 2.0 * kPi);
    const UniversalMember g = universal_member_linear(std::abs(std::cos(t)), std::abs(std::sin(t)) * rng.unimodular());
    for (std::uint64_t k = 0; k < 500; ++k) {
      const BallPoint z = random_ball(rng, 2);
      EXPECT_LT(std::abs(f.value(vec(z))), 1.0);
      EXPECT_LT(std::abs(g.value(vec(z))), 1.0);
    }
    // vanishes on the line through 0 and a
    const Complex lam = rng.in_disc(0.99 / a.norm());
    EXPECT_LT(std::abs(f.value(vec((lam * a).eval()))), 1e-15);
  }
}

TEST(UniversalB2, MembersAreContractions) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(88, i);
    const BallPoint a = random_ball(rng, 2), z = random_ball(rng, 2);
    if (a.norm() < 1e-3) continue;
    const UniversalMember f = universal_member_B2(a[0], a[1]);
    // rho(f(a), f(z)) never exceeds the ball distance
    EXPECT_LE(rho(f.value(vec(a)), f.value(vec(z))), ball_distance(a, z) + 1e-10);
  }
}

TEST(UniversalB2, MemberIsTheLineExtremal) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(90, i);
    const BallPoint a = random_ball(rng, 2, 0.95), z = random_ball(rng, 2);
    if (a.norm() < 1e-3) continue;
    const UniversalMember f = universal_member_B2(a[0], a[1]);
    // the line through a orthogonal to a has minimal-norm point a
    const ComplexLine l(a, ball_point({-std::conj(a[1]), std::conj(a[0])}));
    EXPECT_NEAR(std::abs(f.value(vec(z))), std::abs(psi_l(l)(z)), 1e-12);
  }
}

TEST(UniversalB2, GradientMatchesFiniteDifference) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(89, i);
    const BallPoint a = random_ball(rng, 2, 0.95), z = random_ball(rng, 2, 0.9);
    if (a.norm() < 1e-3) continue;
    const UniversalMember f = universal_member_B2(a[0], a[1]);
    const std::vector<Complex> dir{rng.in_disc(), rng.in_disc()};
    const auto g = f.gradient(vec(z));
    const Complex analytic = g[0] * dir[0] + g[1] * dir[1];
    const Complex fd = oracle::finite_diff_derivative(f.value, vec(z), dir);
    EXPECT_LE(std::abs(analytic - fd), 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST(FLeftInverse, Examples) {
  EXPECT_EQ(F_left_inverse(ball_point({0.0, 0.0})), 0.0);
  for (const Complex z1 : {Complex(0.3, 0.2), Complex(-0.9, 0.0), Complex(0.0, 0.7)})
    EXPECT_NEAR(std::abs(F_left_inverse(ball_point({z1, 0.0})) - z1), 0.0, 1e-15);
  for (int k = 0; k < 64; ++k) {
    const Complex lam = 0.9 * std::polar(1.0, 2.0 * kPi * (k + 0.5) / 64.0);
    EXPECT_NEAR(std::abs(F_left_inverse(f_t_geodesic(1.0, lam)) - (1.0 + 3.0 * lam) / (3.0 + lam)), 0.0, 1e-14);
  }
  expect_code(ErrorCode::DomainError, [] { F_left_inverse(ball_point({0.1, 0.1, 0.1})); });
}

TEST(FLeftInverse, MapsIntoTheDisc) {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    CounterRng rng(90, i);
    EXPECT_LT(std::abs(F_left_inverse(random_ball(rng, 2))), 1.0);
  }
}

TEST(FtGeodesic, Examples) {
  const Complex lam(0.3, -0.4);
  const BallPoint f0 = f_t_geodesic(0.0, lam);
  EXPECT_EQ(f0[0], lam);
  EXPECT_EQ(f0[1], 0.0);
  for (double t : {0.0, 0.5, 1.0, 2.0, 10.0}) EXPECT_NEAR(f_t_geodesic(t, 1.0).norm(), 1.0, 1e-15);
}

TEST(FtGeodesic, StaysInTheBall) {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    CounterRng rng(91, i);
    const double t = rng.uniform(-20.0, 20.0);
    const Complex lam = rng.in_disc(1.0 - 1e-6);
    EXPECT_LT(f_t_geodesic(t, lam).squaredNorm(), 1.0);
  }
}

TEST(FtGeodesic, FIsALeftInverseUpToAutomorphism) {
  for (double t : {0.0, 0.5, 1.0, 2.0, 10.0}) {
    double worst = 0;
    for (std::uint64_t i = 0; i < 64; ++i) {
      CounterRng rng(92, i);
      const Complex l1 = rng.in_disc(0.95), l2 = rng.in_disc(0.95);
      const Complex F1 = F_left_inverse(f_t_geodesic(t, l1)), F2 = F_left_inverse(f_t_geodesic(t, l2));
      worst = std::max(worst, std::abs(rho(F1, F2) - rho(l1, l2)));
      if (t == 0.0) EXPECT_NEAR(std::abs(F1 - l1), 0.0, 1e-15);
      // the disc is also a geodesic of the ball
      EXPECT_NEAR(ball_distance(f_t_geodesic(t, l1), f_t_geodesic(t, l2)), rho(l1, l2), 1e-9);
    }
    EXPECT_LT(worst, 1e-10) << "t = " << t;
  }
}

TEST(CStar, Examples) {
  const BallPoint z = ball_point({Complex(0.3, 0.1), Complex(-0.2, 0.4)}), w = ball_point({0.1, Complex(0.0, -0.5)});
  EXPECT_NEAR(c_star_ball(BallPoint::Zero(2), z), z.norm(), 1e-15);
  EXPECT_NEAR(c_star_ball(w, z), c_star_ball(z, w), 1e-15);
  EXPECT_EQ(c_star_ball(z, z), 0.0);
}

TEST(CStar, AutomorphismInvariance) {
  double worst = 0;
  for (int n : {2, 3}) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      CounterRng rng(93, i);
      const BallPoint a = random_ball(rng, n), w = random_ball(rng, n, 0.95), z = random_ball(rng, n, 0.95);
      worst = std::max(worst, std::abs(c_star_ball(ball_automorphism(a, w), ball_automorphism(a, z)) - c_star_ball(w, z)));
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Locus, Examples) {
  const LocusResult r10 = boundary_modulus_locus(ball_point({1.0, 0.0}));
  EXPECT_TRUE(r10.on_locus);
  EXPECT_FALSE(r10.f_defined);

  const LocusResult r01 = boundary_modulus_locus(ball_point({0.0, 1.0}));
  EXPECT_TRUE(r01.on_locus);
  EXPECT_NEAR(r01.f_modulus, 1.0, 1e-15);

  const LocusResult rq = boundary_modulus_locus(ball_point({0.0, std::polar(1.0, kPi / 4)}));
  EXPECT_FALSE(rq.on_locus);
  EXPECT_NEAR(rq.f_modulus, 1.0 / std::sqrt(5.0), 1e-15);

  expect_code(ErrorCode::DomainError, [] { boundary_modulus_locus(ball_point({0.5, 0.5})); });
  expect_code(ErrorCode::Indeterminate, [] { F_left_inverse(ball_point({1.0 - 1e-15, 0.0})); });
}

TEST(Locus, AgreesWithDirectModulus) {
  int compared = 0, on = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    CounterRng rng(94, i);
    BallPoint z = random_sphere(rng, 2);
    if (i % 2 == 1) {
      // put every other point on the locus: z2 (1 - conj z1) real
      const double s = std::sqrt(1.0 - std::norm(z[0]));
      const Complex ph = (1.0 - z[0]) / std::abs(1.0 - z[0]);
      z[1] = (rng.uniform() < 0.5 ? s : -s) * ph;
    }
    if ((z - ball_point({1.0, 0.0})).norm() < 1e-6) continue;  // near the indeterminacy point
    const LocusResult r = boundary_modulus_locus(z);
    const bool modulus_one = std::abs(r.f_modulus - 1.0) < 1e-8;
    // |F| - 1 is quadratic in Im, so skip the band where the two tolerances disagree
    if (!r.on_locus && modulus_one) continue;
    ++compared;
    on += r.on_locus;
    EXPECT_EQ(r.on_locus, modulus_one) << i;
  }
  EXPECT_GT(compared, 9900);
  EXPECT_GT(on, 4900);
}
