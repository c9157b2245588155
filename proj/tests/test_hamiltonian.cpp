#include "symcap/audin_polterovich.hpp"
#include "symcap/cone.hpp"
#include "symcap/hamiltonian.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace symcap;

TEST(Flow, HarmonicOscillatorQuarterTurn) {
  const Vec x0 = (Vec(2) << 1, 0).finished();
  const Vec y = flow_end(harmonic_oscillator(1), x0, 256);
  EXPECT_NEAR(y[0], std::cos(1.0), 1e-9);
  EXPECT_NEAR(y[1], -std::sin(1.0), 1e-9);
}

TEST(Flow, MomentumTranslatesPosition) {
  const Vec x0 = (Vec(4) << 0.3, -1, 2, 5).finished();
  const Vec y = flow_end(momentum(2, 0), x0, 16);
  EXPECT_NEAR((y - (Vec(4) << 1.3, -1, 2, 5).finished()).norm(), 0.0, 1e-14);
}

TEST(Flow, AutonomousEnergyConserved) {
  const Hamiltonian H = bump_hamiltonian(2, 1.5, 1.0, 0.8);
  const Vec x0 = (Vec(4) << 1.2, 0.1, -0.3, 0.2).finished();
  const FlowPath p = flow(H, x0, 512, 1e6, true);
  for (const Vec& x : p.path) EXPECT_NEAR(H(0, x), H(0, x0), 1e-8);
}

TEST(Flow, PathHasOneEntryPerStep) {
  const FlowPath p = flow(harmonic_oscillator(1), (Vec(2) << 1, 0).finished(), 32, 1e6, true);
  EXPECT_EQ(p.path.size(), 33u);
  EXPECT_EQ((p.path.back() - p.end).norm(), 0.0);
}

TEST(Flow, TimeOneMapIsSymplectic) {
  const Hamiltonian H = bump_hamiltonian(2, 2.0, 0.5, 1.0);
  std::vector<Vec> probes{(Vec(4) << 0.6, 0.2, -0.4, 0.3).finished(), (Vec(4) << 1.0, 0, 0, 0.2).finished()};
  EXPECT_LE(symplecticity_defect(time_one_map(H, 256), probes), 1e-5);
}

TEST(HoferNorm, BumpOscillationIsAmplitude) {
  for (double c : {0.5, 1.0, 3.0}) EXPECT_NEAR(hofer_norm(bump_hamiltonian(2, c)), c, 0.02 * c);
}

TEST(HoferNorm, ZeroHamiltonian) { EXPECT_EQ(hofer_norm(zero_hamiltonian(2)), 0.0); }

TEST(HoferNorm, TimeReversalKeepsNorm) {
  const Hamiltonian H = candidate_hamiltonian({"fourier", 0.8, 2.0, 1.0, 4, {}}, 2);
  EXPECT_NEAR(hofer_norm(time_reversed(H)), hofer_norm(H), 0.02 * hofer_norm(H));
}

TEST(HoferNorm, RejectsNoncompactSupport) {
  EXPECT_THROW(hofer_norm(harmonic_oscillator(1)), std::invalid_argument);
}

TEST(Displacement, UnitSquareByShear) {
  const SampledSet square = unit_square_samples(200);
  const Hamiltonian H = rectangle_ramp(0.05, 0.02);
  const DisplacementCertificate cert = displacement_check(H, square, 64);
  EXPECT_TRUE(cert.displaced);
  EXPECT_LE(cert.hofer_norm, 1.1);
  EXPECT_GE(cert.hofer_norm, 1.0);
}

TEST(Displacement, ZeroHamiltonianFixesSet) {
  const DisplacementCertificate cert = displacement_check(zero_hamiltonian(1), unit_square_samples(50));
  EXPECT_FALSE(cert.displaced);
  EXPECT_EQ(cert.min_separation, 0.0);
}

TEST(Displacement, DimensionMismatch) {
  EXPECT_THROW(displacement_check(zero_hamiltonian(2), unit_square_samples(4)), DimensionError);
}

TEST(CylinderProbe, NormNearArea) {
  const CylinderProbeReport r = cylinder_energy_probe(pi, 2.0);
  EXPECT_TRUE(r.achieved);
  EXPECT_LE(r.best_overhead, 0.25);
  EXPECT_GT(r.best_overhead, 0.0);
}

TEST(CylinderProbe, NormScalesWithArea) {
  const double a = cylinder_energy_probe(1.0, 2.0, 1.0, 2, 40).sweep[0].norm;
  const double b = cylinder_energy_probe(2.0, 2.0, 1.0, 2, 40).sweep[0].norm;
  EXPECT_NEAR(b / a, 2.0, 0.02);
}

TEST(CylinderProbe, ZeroOverheadRejected) {
  EXPECT_THROW(cylinder_energy_probe(pi, 2.0, 0.0), std::invalid_argument);
}

TEST(CylinderProbe, UnreachableOverheadCarriesReport) {
  try {
    cylinder_energy_probe(pi, 2.0, 1e-4, 2, 40);
    FAIL() << "expected CylinderProbeError";
  } catch (const CylinderProbeError& e) {
    EXPECT_FALSE(e.report.achieved);
    EXPECT_EQ(e.report.sweep.size(), 4u);
    EXPECT_TRUE(std::isfinite(e.report.best_overhead));
  }
}

TEST(Candidates, ParsesLines) {
  std::istringstream in("# family\n\ntype=shear amplitude=0.3 seed=7\ntype=ramp support=2.5 cutoff=0.5  # tail\n");
  const std::vector<CandidateSpec> c = parse_candidates(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].type, "shear");
  EXPECT_EQ(c[0].amplitude, 0.3);
  EXPECT_EQ(c[0].seed, 7u);
  EXPECT_EQ(c[1].support, 2.5);
  EXPECT_EQ(c[1].cutoff, 0.5);
}

TEST(Candidates, RejectsBadLines) {
  for (const char* bad : {"type=spiral", "amplitude", "amplitude=abc", "colour=red", "support=-1"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_candidates(in), std::invalid_argument) << bad;
  }
}

TEST(Candidates, TranslationMovesByAmplitude) {
  CandidateSpec c{"translation", 0.4, 5.0, 1.0, 1, {1, 0, 0, 0}};
  const Vec y = flow_end(candidate_hamiltonian(c, 2), Vec::Zero(4), 64);
  EXPECT_NEAR(y.norm(), 0.4, 1e-12);
}

TEST(Candidates, SearchAgainstLagrangianIsConsistent) {
  SampledSet L(2);
  const APLagrangian m = APLagrangian::rotated(2);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      const double a = pi * i / 40, b = 2 * pi * j / 40;
      L.add(sample(m, a, (Vec(2) << std::cos(b), std::sin(b)).finished()));
    }
  L.fill_distance = nearest_neighbour_spacing(L);
  const CandidateSearchReport r = candidate_search(L, default_candidates(), 0.9 * pi, 16);
  EXPECT_EQ(r.results.size(), default_candidates().size());
  EXPECT_TRUE(r.consistent);
  int displaced = 0;
  for (const CandidateResult& c : r.results) displaced += c.cert.displaced;
  EXPECT_GE(displaced, 1);
}
