#include "symcap/cone.hpp"
#include "symcap/set_analysis.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace symcap;

namespace {

ConeMap half_cone(int n, int samples = 1024) {
  return build_cone({generator_loop(APLagrangian::rotated(n), Generator::half, samples)});
}

Vec sphere_point(double theta, double azimuth) {
  return (Vec(3) << std::sin(theta) * std::cos(azimuth), std::sin(theta) * std::sin(azimuth), std::cos(theta))
      .finished();
}

}  // namespace

TEST(SmoothStepProfile, ExactPlateaus) {
  const SmoothStep rho(0.1);
  for (double s : {0.0, 0.03, 0.07, 0.1}) EXPECT_EQ(rho(s), 0.0) << s;
  for (double s : {0.9, 0.95, 1.0}) EXPECT_EQ(rho(s), 1.0) << s;
  EXPECT_NEAR(rho(0.5), 0.5, 1e-12);
  double prev = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double v = rho(k / 200.0);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
}

TEST(SmoothStepProfile, InverseRoundTrips) {
  const SmoothStep rho(0.1);
  for (double v : {0.01, 0.3, 0.5, 0.99}) EXPECT_NEAR(rho(rho.inverse(v)), v, 1e-10);
}

TEST(Cone, FullSizeAtOddTimes) {
  const ConeMap cone = half_cone(2);
  const Loop& g = cone.generators()[0];
  for (double s : {0.0, 0.2, 0.61, 0.9}) EXPECT_NEAR((cone(1.0, s).coords() - g(s).coords()).norm(), 0.0, 1e-15);
}

TEST(Cone, CollapsedAtStart) {
  const ConeMap cone = half_cone(3);
  for (double s : {0.0, 0.25, 0.5}) {
    EXPECT_EQ(cone(0.0, s).norm(), 0.0);
    EXPECT_EQ(cone(2.0, s).norm(), 0.0);
  }
}

TEST(Cone, TwoGeneratorsInSequence) {
  const APLagrangian m = APLagrangian::rotated(2);
  const ConeMap cone = build_cone(cone_generators(m, 512));
  ASSERT_EQ(cone.k(), 2);
  const Loop& fiber = cone.generators()[1];
  EXPECT_NEAR((cone(3.0, 0.3).coords() - fiber(0.3).coords()).norm(), 0.0, 1e-15);
  EXPECT_EQ(cone(2.0, 0.3).norm(), 0.0);
  EXPECT_EQ(cone(4.0, 0.3).norm(), 0.0);
}

TEST(Cone, ImageMatchesScaledLoops) {
  // Dense double grid of t * gamma(z), compared both ways with the cone samples.
  const ConeMap cone = half_cone(2);
  const Loop& g = cone.generators()[0];
  SampledSet cone_pts(2), scaled(2);
  const int m = 200;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j < m; ++j) {
      cone_pts.add(cone(2.0 * i / m, double(j) / m));
      scaled.add(Vec(double(i) / m * g(double(j) / m).coords()));
    }
  // Largest gap between grid neighbours of either sampling bounds the distance
  // from any point of one set to the other.
  double gap = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * m + j;
      for (const SampledSet* set : {&cone_pts, &scaled}) {
        gap = std::max(gap, (set->at(k + m) - set->at(k)).norm());
        gap = std::max(gap, (set->at(k + (j + 1 < m ? 1 : 1 - m)) - set->at(k)).norm());
      }
    }
  const KdTree to_scaled(scaled.data.data(), scaled.size(), 4), to_cone(cone_pts.data.data(), cone_pts.size(), 4);
  double worst = 0.0;
  for (std::size_t i = 0; i < cone_pts.size(); ++i) worst = std::max(worst, to_scaled.nearest(cone_pts.point(i)).distance);
  for (std::size_t i = 0; i < scaled.size(); ++i) worst = std::max(worst, to_cone.nearest(scaled.point(i)).distance);
  EXPECT_LE(worst, gap);
  EXPECT_LT(gap, 0.1);
}

TEST(Cone, RejectsEmptyOrMismatchedGenerators) {
  EXPECT_THROW(build_cone({}), std::invalid_argument);
  const Loop a = generator_loop(APLagrangian::plain(2), Generator::half, 64);
  const Loop b = generator_loop(APLagrangian::rotated(2), Generator::half, 64);
  EXPECT_THROW(build_cone({a, b}), std::invalid_argument);
}

TEST(SphereMap, PolesGoToOrigin) {
  const auto u = sphere_map(half_cone(2));
  EXPECT_EQ(u(sphere_point(0.0, 0.0)).norm(), 0.0);
  EXPECT_EQ(u(sphere_point(pi, 0.0)).norm(), 0.0);
  EXPECT_EQ(u(sphere_point(0.01, 1.0)).norm(), 0.0);
}

TEST(SphereMap, EquatorTracesGenerator) {
  const ConeMap cone = half_cone(2);
  const auto u = sphere_map(cone);
  for (double s : {0.1, 0.4, 0.8}) {
    const Vec expected = cone.generators()[0](s).coords();
    EXPECT_NEAR((u(sphere_point(pi / 2, 2 * pi * s)).coords() - expected).norm(), 0.0, 1e-12);
  }
}

TEST(SphereMap, DerivativeBoundedNearPoles) {
  const auto u = sphere_map(half_cone(2));
  double prev = 0.0;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      const double a = 2 * pi * k / 64;
      for (double th : {0.15, 0.3, pi - 0.3}) {
        const Vec d = (u(sphere_point(th + h, a)).coords() - u(sphere_point(th, a)).coords()) / h;
        worst = std::max(worst, d.norm());
      }
    }
    if (prev > 0) {
      EXPECT_LT(worst, 1.5 * prev + 1.0);
    }
    prev = worst;
  }
  EXPECT_TRUE(std::isfinite(prev));
}

TEST(AssembleX, EvenDimensionContainment) {
  XOptions opt;
  opt.phi_samples = 64;
  opt.sphere_samples = 64;
  opt.cone_radial = opt.cone_angular = 128;
  const SampledSet X = assemble_X(2, opt);
  EXPECT_EQ(X.count_part(0), 64u * 64u);
  EXPECT_EQ(X.count_part(1), 2u * 128u * 128u);
  double worst_norm = 0.0, worst_slot = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const PhasePoint x(2, X.at(i));
    worst_norm = std::max(worst_norm, x.norm());
    const CVec w = x.complex();
    for (int j = 0; j < 2; ++j) worst_slot = std::max(worst_slot, std::abs(w[j]));
  }
  EXPECT_LE(worst_norm, std::sqrt(2.0) + 1e-10);
  EXPECT_LE(worst_slot, 1.0 + 1e-10);
  EXPECT_GT(X.fill_distance, 0.0);
}

TEST(AssembleX, OddDimensionAfterPermutation) {
  XOptions opt;
  opt.phi_samples = 32;
  opt.sphere_samples = 24;
  opt.cone_radial = opt.cone_angular = 64;
  const SampledSet X = assemble_X(3, opt);
  double last = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const PhasePoint x(3, X.at(i));
    EXPECT_LE(x.norm(), std::sqrt(2.0) + 1e-10);
    const CVec w = x.complex();
    EXPECT_LE(std::abs(w[0]), 1 + 1e-10);
    EXPECT_LE(std::abs(w[1]), 1 + 1e-10);
    last = std::max(last, std::abs(w[2]));
  }
  EXPECT_GT(last, 1.0 + 1e-3);
}

TEST(AssembleX, LagrangianPartPassesMembership) {
  XOptions opt;
  opt.phi_samples = 16;
  opt.sphere_samples = 16;
  opt.cone_radial = opt.cone_angular = 16;
  opt.fill_probes = 0;
  const SampledSet X = assemble_X(4, opt);
  const APLagrangian m = APLagrangian::rotated(4);
  for (std::size_t i = 0; i < X.size(); ++i)
    if (X.part[i] == 0) {
      ASSERT_TRUE(membership(m, PhasePoint(4, X.at(i))));
    }
}

TEST(PointCloud, BinaryRoundTrip) {
  SampledSet s(2);
  s.add(Vec::LinSpaced(4, 0, 1));
  s.add(Vec::LinSpaced(4, -1, 2));
  const auto path = (std::filesystem::temp_directory_path() / "symcap_cloud_test.bin").string();
  write_point_cloud(s, path);
  const SampledSet back = read_point_cloud(path);
  EXPECT_EQ(back.n, 2);
  EXPECT_EQ(back.data, s.data);
  std::filesystem::remove(path);
}
