#include "symcap/audin_polterovich.hpp"
#include "symcap/core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace symcap;

namespace {

Loop circle(double r, int samples, bool with_derivative = false) {
  Loop::Deriv d;
  if (with_derivative)
    d = [r](double t) {
      Vec v(2);
      v << -2 * pi * r * std::sin(2 * pi * t), 2 * pi * r * std::cos(2 * pi * t);
      return v;
    };
  return Loop(
      1,
      [r](double t) {
        Vec x(2);
        x << r * std::cos(2 * pi * t), r * std::sin(2 * pi * t);
        return PhasePoint(1, x);
      },
      d, samples);
}

// Ellipse-like loop with harmonics; area known in closed form.
Loop wobbly(int samples, std::function<double(double)> sigma = [](double t) { return t; }) {
  return Loop(
      2,
      [sigma](double u) {
        const double t = 2 * pi * sigma(u);
        Vec x(4);
        x << std::cos(t) + 0.3 * std::cos(2 * t), 0.5 * std::sin(t), 2.0 * std::sin(t), 0.5 * std::cos(t);
        return PhasePoint(2, x);
      },
      {}, samples);
}

// q1 dp1 + q2 dp2 over the wobbly loop: 2 pi from the first pair, -pi/4 from the second.
constexpr double wobbly_area = 2 * pi - 0.25 * pi;

Vec unit(int dim, int i) { return Vec::Unit(dim, i); }

}  // namespace

TEST(Omega, CanonicalPairIsOne) { EXPECT_EQ(omega0(unit(2, 0), unit(2, 1)), 1.0); }

TEST(Omega, VanishesOnEqualVectors) {
  const Vec u = (Vec(4) << 0.3, -1.7, 2.2, 0.9).finished();
  EXPECT_EQ(omega0(u, u), 0.0);
}

TEST(Omega, PositionPlaneIsLagrangian) { EXPECT_EQ(omega0(unit(4, 0), unit(4, 1)), 0.0); }

TEST(Omega, MatchesMatrixForm) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Vec u(6), v(6);
  for (int i = 0; i < 6; ++i) {
    u[i] = g(rng);
    v[i] = g(rng);
  }
  EXPECT_NEAR(omega0(u, v), u.dot(standard_j(3) * v), 1e-14);
}

TEST(Omega, RejectsMismatchedDimensions) {
  EXPECT_THROW(omega0(Vec::Zero(4), Vec::Zero(2)), DimensionError);
  EXPECT_THROW(omega0(Vec::Zero(3), Vec::Zero(3)), DimensionError);
}

TEST(PhasePoint, ComplexViewRoundTripsExactly) {
  const Vec x = (Vec(6) << 0.1, -2.5, 3.0, 1e-300, 7.25, -0.0).finished();
  const PhasePoint p(3, x);
  const PhasePoint back = PhasePoint::from_complex(p.complex());
  for (int i = 0; i < 6; ++i) EXPECT_EQ(back[i], x[i]);
  EXPECT_EQ(p.complex()[0], cplx(0.1, 1e-300));
  EXPECT_EQ(p.complex()[1], cplx(-2.5, 7.25));
}

TEST(PhasePoint, RejectsWrongLength) {
  EXPECT_THROW(PhasePoint(2, Vec::Zero(3)), DimensionError);
  EXPECT_THROW(PhasePoint(0), DimensionError);
}

TEST(Liouville, UnitCircleEnclosesPi) { EXPECT_NEAR(liouville_integral(circle(1.0, 1024)), pi, 1e-8); }

TEST(Liouville, AnalyticDerivativeAgrees) {
  EXPECT_NEAR(liouville_integral(circle(1.0, 1024, true)), pi, 1e-12);
}

TEST(Liouville, ConstantLoopHasZeroArea) {
  const Loop c(2, [](double) { return PhasePoint(2, (Vec(4) << 1, 2, 3, 4).finished()); }, {}, 64);
  EXPECT_NEAR(liouville_integral(c), 0.0, 1e-14);
}

TEST(Liouville, HalfTurnLoopOnTheLagrangian) {
  const Loop g = generator_loop(APLagrangian::plain(2), Generator::half);
  EXPECT_NEAR(liouville_integral(g), pi / 2, 1e-8);
}

TEST(Liouville, ClockwiseCircleIsNegative) {
  const Loop c(
      1,
      [](double t) { return PhasePoint(1, (Vec(2) << std::cos(2 * pi * t), -std::sin(2 * pi * t)).finished()); },
      {}, 512);
  EXPECT_NEAR(liouville_integral(c), -pi, 1e-8);
}

TEST(Liouville, RejectsOpenLoop) {
  const Loop arc(1, [](double t) { return PhasePoint(1, (Vec(2) << t, t * t).finished()); }, {}, 64);
  EXPECT_THROW(liouville_integral(arc), std::domain_error);
}

TEST(Liouville, RejectsNonFiniteSamples) {
  const Loop bad(
      1,
      [](double t) {
        const double v = t > 0.4 && t < 0.6 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
        return PhasePoint(1, (Vec(2) << v, 0.0).finished());
      },
      {}, 64);
  EXPECT_THROW(liouville_integral(bad), std::domain_error);
}

TEST(Liouville, RejectsOrderBelowTwo) { EXPECT_THROW(liouville_integral(circle(1.0, 64), 1), std::invalid_argument); }

TEST(Liouville, ErrorDropsFourfoldPerDoubling) {
  // Finite-difference tangents, so the error decays algebraically.
  double prev = std::abs(liouville_integral(wobbly(16)) - wobbly_area);
  for (int m : {32, 64}) {
    const double err = std::abs(liouville_integral(wobbly(m)) - wobbly_area);
    if (prev < 1e-13) break;
    EXPECT_LE(err, prev / 4.0) << "M = " << m;
    prev = err;
  }
}

TEST(Liouville, ReparametrizationInvariant) {
  auto sigma = [](double t) { return t + 0.08 * std::sin(2 * pi * t); };
  EXPECT_NEAR(liouville_integral(wobbly(2048, sigma)), liouville_integral(wobbly(2048)), 1e-8);
}

TEST(Liouville, ScalesQuadratically) {
  for (double c : {0.25, 3.0}) EXPECT_NEAR(liouville_integral(circle(c, 2048)), c * c * pi, 1e-8);
}

TEST(Defect, IdentityIsExact) {
  std::vector<Vec> probes{Vec::Zero(4), (Vec(4) << 1, -2, 0.5, 3).finished()};
  EXPECT_LE(symplecticity_defect([](const Vec& x) { return x; }, probes), 1e-10);
}

TEST(Defect, UnitaryIsSymplectic) {
  const CMat u = build_unitary(3);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<Vec> probes;
  for (int k = 0; k < 100; ++k) {
    Vec x(6);
    for (int i = 0; i < 6; ++i) x[i] = g(rng);
    probes.push_back(x);
  }
  auto map = [u](const Vec& x) { return PhasePoint::from_complex(u * PhasePoint(3, x).complex()).coords(); };
  EXPECT_LE(symplecticity_defect(map, probes), 1e-6);
}

TEST(Defect, ShearIsSymplectic) {
  std::vector<Vec> probes{(Vec(2) << 0.2, 0.7).finished(), (Vec(2) << -3.0, 1.0).finished()};
  EXPECT_LE(symplecticity_defect([](const Vec& x) { return Vec((Vec(2) << x[0], x[1] + x[0]).finished()); }, probes),
            1e-6);
}

TEST(Defect, DetectsNonSymplecticScaling) {
  std::vector<Vec> probes{(Vec(2) << 0.2, 0.7).finished()};
  EXPECT_NEAR(symplecticity_defect([](const Vec& x) { return Vec(2.0 * x); }, probes), 3.0, 1e-8);
}

TEST(Defect, ReportsFailingProbe) {
  std::vector<Vec> probes{Vec::Zero(2)};
  auto broken = [](const Vec&) { return Vec(Vec::Constant(2, std::numeric_limits<double>::infinity())); };
  EXPECT_THROW(symplecticity_defect(broken, probes), std::runtime_error);
}

TEST(Regions, RadiusFromCapacity) {
  EXPECT_NEAR(BallSpec{pi}.radius(), 1.0, 1e-15);
  EXPECT_NEAR(CylinderSpec{2 * pi}.radius(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(PolydiscSpec::unit(3).radii.size(), 3u);
}
