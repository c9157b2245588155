#include "symcap/cli.hpp"
#include "symcap/squeeze.hpp"

#include <gtest/gtest.h>

using namespace symcap;

TEST(PrincipalEllipse, EnclosesPoints) {
  std::vector<Vec2> pts;
  for (int k = 0; k < 500; ++k) {
    const double t = 2 * pi * k / 500;
    pts.emplace_back(1.0 + 2 * std::cos(t) * std::cos(0.4) - 0.5 * std::sin(t) * std::sin(0.4),
                     -1.0 + 2 * std::cos(t) * std::sin(0.4) + 0.5 * std::sin(t) * std::cos(0.4));
  }
  const Ellipse2 e = principal_ellipse(pts);
  const PlanarDomain U = PlanarDomain::ellipse(e.center, e.a * (1 + 1e-9), e.b * (1 + 1e-9), e.angle);
  for (const Vec2& p : pts) EXPECT_TRUE(U.contains(p));
  EXPECT_NEAR(e.area(), pi, 0.02 * pi);
}

TEST(InflatePoints, OctagonCoversDisc) {
  const std::vector<Vec2> out = inflate_points({Vec2(0, 0)}, 0.1);
  ASSERT_EQ(out.size(), 8u);
  // Every edge of the octagon lies at distance eps from the center.
  for (int k = 0; k < 8; ++k) EXPECT_NEAR((0.5 * (out[k] + out[(k + 1) % 8])).norm(), 0.1, 1e-12);
}

TEST(SegmentEllipse, ContainsSegmentAndShrinksWithCut) {
  double prev = unbounded;
  for (double c : {0.9, 0.5, 0.0, -0.5}) {
    const Ellipse2 e = segment_ellipse(c, 1e-3);
    const PlanarDomain U = PlanarDomain::ellipse(e.center, e.a, e.b, e.angle);
    // Boundary of the cut disc: the arc left of the cut plus the chord.
    const double half_chord = std::sqrt(1 - c * c);
    for (int k = 0; k < 720; ++k) {
      const double t = 2 * pi * k / 720;
      Vec2 p(std::cos(t), std::sin(t));
      if (p.x() > c) p = Vec2(c, std::clamp(p.y(), -half_chord, half_chord));
      EXPECT_TRUE(U.contains(p)) << c << " " << t;
    }
    EXPECT_LE(e.area(), prev * (1 + 1e-5));
    if (c <= 0) {
      EXPECT_LT(e.area(), 0.95 * pi);
    }
    prev = e.area();
  }
  EXPECT_THROW(segment_ellipse(-1.0), std::invalid_argument);
}

TEST(Squeeze, SmallShadowCurveIntoThinCylinder) {
  SqueezeOptions opt;
  opt.route = SqueezeOptions::Route::shadow;
  const SqueezeResult r = squeeze_pipeline(squeeze_test_curve(), 0.5, opt);
  EXPECT_TRUE(r.success) << r.reason;
  EXPECT_EQ(r.route, "shadow");
  EXPECT_LT(r.shadow_area, 0.5);
  EXPECT_LE(r.defect, 1e-5);
  EXPECT_LT(r.image_radius, r.cylinder_radius);
  EXPECT_TRUE(r.injective);
}

TEST(Squeeze, SphereCurveIntoUnitCylinderByRotation) {
  SqueezeOptions opt;
  opt.route = SqueezeOptions::Route::rotation;
  const SqueezeResult r = squeeze_pipeline(squeeze_sphere_curve(), pi, opt);
  EXPECT_TRUE(r.success) << r.reason;
  EXPECT_EQ(r.route, "rotation");
  EXPECT_TRUE(r.rotation.found);
  EXPECT_LT(r.rotation.c, 1.0);
  EXPECT_LE(r.defect, 1e-5);
  EXPECT_LT(r.image_radius, std::sqrt(1.0));
}

TEST(Squeeze, ReportsFailureOnX) {
  XOptions opt;
  opt.phi_samples = 128;
  opt.sphere_samples = 128;
  opt.cone_radial = opt.cone_angular = 128;
  const SqueezeResult r = squeeze_pipeline(assemble_X(2, opt), pi);
  EXPECT_FALSE(r.success);
  EXPECT_FALSE(r.reason.empty());
}

TEST(Squeeze, RotationRouteNeedsBallAndArea) {
  SampledSet far(2);
  far.add(Vec((Vec(4) << 2, 0, 0, 0).finished()));
  SqueezeOptions opt;
  opt.route = SqueezeOptions::Route::rotation;
  EXPECT_FALSE(squeeze_pipeline(far, pi, opt).success);
  EXPECT_FALSE(squeeze_pipeline(squeeze_sphere_curve(500), 1.0, opt).success);
}

TEST(Squeeze, RejectsEmptySetOrArea) {
  EXPECT_THROW(squeeze_pipeline(SampledSet(2), 1.0), std::invalid_argument);
  EXPECT_THROW(squeeze_pipeline(squeeze_test_curve(100), 0.0), std::invalid_argument);
}
