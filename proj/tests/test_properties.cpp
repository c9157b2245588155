#include "symcap/audin_polterovich.hpp"
#include "symcap/hamiltonian.hpp"
#include "symcap/set_analysis.hpp"
#include "symcap/spectrum.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

using namespace symcap;

namespace {

// Small seeded generator of random test inputs.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Vec vector(int dim, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v[j] = g(rng_);
    return v;
  }
  Mat orthogonal(int dim) {
    Mat a(dim, dim);
    for (int c = 0; c < dim; ++c) a.col(c) = vector(dim);
    return Eigen::HouseholderQR<Mat>(a).householderQ();
  }
  // Commensurable pair (g p, g q) with small integers p, q.
  std::pair<double, double> commensurable() {
    const double g = uniform(0.2, 2.0);
    return {g * integer(1, 9), g * integer(1, 9)};
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

template <class F>
void for_all(int cases, std::uint64_t seed, F&& check) {
  Gen gen(seed);
  for (int i = 0; i < cases; ++i) {
    SCOPED_TRACE("case " + std::to_string(i));
    check(gen);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

// Elements of {i a + j b} in [-w, w], by brute force over a coefficient box,
// rounded to a tolerance grid for set comparison.
std::set<long long> minkowski_window(double a, double b, double w, double unit) {
  std::set<long long> out;
  const int span = static_cast<int>(std::ceil(4 * w / std::min(a, b))) + 20;
  for (int i = -span; i <= span; ++i)
    for (int j = -span; j <= span; ++j) {
      const double v = i * a + j * b;
      if (std::abs(v) <= w + 1e-9) out.insert(std::llround(v / unit));
    }
  return out;
}

std::set<long long> cyclic_window(double g, double w, double unit) {
  std::set<long long> out;
  const long long m = static_cast<long long>(std::floor(w / g + 1e-9));
  for (long long k = -m; k <= m; ++k) out.insert(std::llround(k * g / unit));
  return out;
}

}  // namespace

TEST(Property, OmegaBilinearAndAntisymmetric) {
  for_all(200, 1, [](Gen& g) {
    const int n = g.integer(1, 5);
    const Vec u = g.vector(2 * n), v = g.vector(2 * n), w = g.vector(2 * n);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    EXPECT_NEAR(omega0(u, v), -omega0(v, u), 1e-12);
    EXPECT_EQ(omega0(u, u), 0.0);
    EXPECT_NEAR(omega0(Vec(a * u + b * w), v), a * omega0(u, v) + b * omega0(w, v), 1e-10);
  });
}

TEST(Property, OmegaPreservedByUnitaries) {
  for_all(50, 2, [](Gen& g) {
    const int n = g.integer(2, 5);
    const CMat u = build_unitary(n);
    const Vec x = g.vector(2 * n), y = g.vector(2 * n);
    const Vec ux = PhasePoint::from_complex(u * PhasePoint(n, x).complex()).coords();
    const Vec uy = PhasePoint::from_complex(u * PhasePoint(n, y).complex()).coords();
    EXPECT_NEAR(omega0(ux, uy), omega0(x, y), 1e-10);
  });
}

TEST(Property, LiouvilleIntegralTranslationInvariant) {
  for_all(20, 3, [](Gen& g) {
    const Vec shift = g.vector(4);
    const double r = g.uniform(0.2, 2.0);
    auto circle = [r](const Vec& c) {
      return Loop(
          2,
          [r, c](double t) {
            Vec x = c;
            x[1] += r * std::cos(2 * pi * t);
            x[3] += r * std::sin(2 * pi * t);
            return PhasePoint(2, x);
          },
          {}, 512);
    };
    EXPECT_NEAR(liouville_integral(circle(shift)), liouville_integral(circle(Vec::Zero(4))), 1e-9);
    EXPECT_NEAR(liouville_integral(circle(shift)), pi * r * r, 1e-8);
  });
}

TEST(Property, RandomLoopWindingMatchesArea) {
  for_all(45, 4, [](Gen& g) {
    const int n = g.integer(2, 4), k = g.integer(-4, 4);
    const APLagrangian m = g.integer(0, 1) ? APLagrangian::plain(n) : APLagrangian::rotated(n);
    const Loop x = random_lifted_loop(m, k, g.rng(), 1024);
    EXPECT_EQ(lift(m, x).winding, k);
    EXPECT_NEAR(liouville_integral(x), k * ap_spectrum(m.scale, n).min_positive(), 1e-6);
  });
}

TEST(Property, RealGcdScalesAndDivides) {
  for_all(200, 5, [](Gen& g) {
    const int p = g.integer(1, 30), q = g.integer(1, 30);
    const double s = g.uniform(0.1, 10.0);
    const double unit = real_gcd(double(p), double(q));
    EXPECT_NEAR(unit, std::gcd(p, q), 1e-9);
    const double scaled = real_gcd(s * p, s * q);
    EXPECT_NEAR(scaled, s * unit, 1e-9 * s);
    const double ra = s * p / scaled, rb = s * q / scaled;
    EXPECT_NEAR(ra, std::round(ra), 1e-8);
    EXPECT_NEAR(rb, std::round(rb), 1e-8);
  });
}

TEST(Property, ProductSpectrumCommutesAndAssociates) {
  for_all(100, 6, [](Gen& g) {
    const double base = g.uniform(0.2, 2.0);
    const ActionSpectrum a{base * g.integer(1, 12), "a", false, std::nullopt};
    const ActionSpectrum b{base * g.integer(1, 12), "b", false, std::nullopt};
    const ActionSpectrum c{base * g.integer(1, 12), "c", false, std::nullopt};
    EXPECT_NEAR(product_spectrum(a, b).generator, product_spectrum(b, a).generator, 1e-12);
    EXPECT_NEAR(product_spectrum(product_spectrum(a, b), c).generator,
                product_spectrum(a, product_spectrum(b, c)).generator, 1e-9);
  });
}

TEST(Property, ProductSpectrumMatchesMinkowskiWindow) {
  for_all(50, 7, [](Gen& g) {
    const auto [a, b] = g.commensurable();
    const ActionSpectrum s = product_spectrum({a, "a", false, std::nullopt}, {b, "b", false, std::nullopt});
    ASSERT_GT(s.generator, 0.0);
    const double unit = 1e-7;
    EXPECT_EQ(cyclic_window(s.generator, 10.0, unit), minkowski_window(a, b, 10.0, unit)) << a << ", " << b;
  });
}

TEST(Property, ContainmentMonotoneInCapacity) {
  for_all(100, 8, [](Gen& g) {
    SampledSet s(2);
    for (int i = 0; i < 20; ++i) s.add(g.vector(4, 0.7));
    const double a = g.uniform(0.5, 10.0), b = a * g.uniform(1.0, 3.0);
    for (int region = 0; region < 2; ++region) {
      const bool small = region ? containment(s, CylinderSpec{a}, 0.0).pass : containment(s, BallSpec{a}, 0.0).pass;
      const bool large = region ? containment(s, CylinderSpec{b}, 0.0).pass : containment(s, BallSpec{b}, 0.0).pass;
      if (small) {
        EXPECT_TRUE(large);
      }
    }
    EXPECT_LE(containment(s, CylinderSpec{a}, 0.0).max_violation, containment(s, BallSpec{a}, 0.0).max_violation);
  });
}

TEST(Property, BoxDimensionRigidMotionInvariantSquare) {
  const SampledSet square = calibration_square(256);
  SampledSet flat(2);
  for (std::size_t i = 0; i < square.size(); ++i)
    flat.add(Vec((Vec(4) << square.at(i)[0], square.at(i)[1], 0, 0).finished()));
  flat.fill_distance = square.fill_distance;
  const double base = box_dimension(flat, 8).slope;
  for_all(5, 9, [&](Gen& g) {
    const Mat q = g.orthogonal(4);
    const Vec t = g.vector(4, 5.0);
    SampledSet moved(2);
    for (std::size_t i = 0; i < flat.size(); ++i) moved.add(Vec(q * flat.at(i) + t));
    moved.fill_distance = flat.fill_distance;
    EXPECT_NEAR(box_dimension(moved, 8).slope, base, 0.05);
  });
}

TEST(Property, BoxDimensionRigidMotionInvariantCurve) {
  const SampledSet curve = calibration_curve(1 << 18);
  const double base = box_dimension(curve, 10).slope;
  for_all(5, 14, [&](Gen& g) {
    const Mat q = g.orthogonal(4);
    const Vec t = g.vector(4, 5.0);
    SampledSet moved(2);
    for (std::size_t i = 0; i < curve.size(); ++i) moved.add(Vec(q * curve.at(i) + t));
    moved.fill_distance = curve.fill_distance;
    EXPECT_NEAR(box_dimension(moved, 10).slope, base, 0.05);
  });
}

TEST(Property, HoferNormScalesLinearly) {
  for_all(10, 10, [](Gen& g) {
    const double c = g.uniform(0.2, 3.0), s = g.uniform(0.5, 4.0);
    const Hamiltonian H = bump_hamiltonian(2, c, g.uniform(0.5, 1.5));
    const double base = hofer_norm(H);
    EXPECT_NEAR(hofer_norm(rescaled(H, s)), s * base, 1e-9 * s * base + 0.02 * s * base);
    EXPECT_NEAR(hofer_norm(time_reversed(H)), base, 0.02 * base);
  });
}

TEST(Property, RescaledFlowIsTimeScaledFlow) {
  for_all(20, 11, [](Gen& g) {
    const double s = g.uniform(0.2, 3.0);
    const Vec x0 = g.vector(2);
    const Vec y = flow_end(rescaled(harmonic_oscillator(1), s), x0, 512);
    const double c = std::cos(s), sn = std::sin(s);
    const Vec expected = (Vec(2) << c * x0[0] + sn * x0[1], -sn * x0[0] + c * x0[1]).finished();
    EXPECT_NEAR((y - expected).norm(), 0.0, 1e-9 * (1 + x0.norm()));
  });
}

TEST(Property, FlowDefectShrinksWithStepHalving) {
  for_all(5, 12, [](Gen& g) {
    const CandidateSpec spec{"fourier", g.uniform(0.5, 1.5), 2.0, 1.0, static_cast<std::uint64_t>(g.integer(1, 999)),
                             {}};
    const Hamiltonian H = candidate_hamiltonian(spec, 2);
    const std::vector<Vec> probes{g.vector(4, 0.7), g.vector(4, 0.7)};
    const double coarse = symplecticity_defect(time_one_map(H, 8), probes, 1e-4);
    const double fine = symplecticity_defect(time_one_map(H, 16), probes, 1e-4);
    EXPECT_LE(fine, std::max(coarse / 4, 1e-7));
    EXPECT_LE(symplecticity_defect(time_one_map(H, 128), probes, 1e-4), 1e-5);
  });
}

TEST(Property, FlowInverseByTimeReversal) {
  for_all(10, 13, [](Gen& g) {
    const CandidateSpec spec{"fourier", 1.0, 2.0, 1.0, static_cast<std::uint64_t>(g.integer(1, 999)), {}};
    const Hamiltonian H = candidate_hamiltonian(spec, 2);
    const Vec x = g.vector(4, 0.8);
    EXPECT_NEAR((flow_end(time_reversed(H), flow_end(H, x, 256), 256) - x).norm(), 0.0, 1e-8);
  });
}
