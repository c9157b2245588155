// Displaces the unit square by a shear Hamiltonian and reports the energy,
// then compares it with a translation that only nudges the square.
#include "symcap/hamiltonian.hpp"

#include <cstdio>

using namespace symcap;

int main() {
  const SampledSet square = unit_square_samples(100);
  for (double delta : {0.2, 0.05, 0.02}) {
    const DisplacementCertificate c = displacement_check(rectangle_ramp(delta, 0.02), square, 32);
    std::printf("shear overshoot %.2f: displaced %s, Hofer norm %.4f, gap %.4f\n", delta, c.displaced ? "yes" : "no",
                c.hofer_norm, c.min_separation);
  }
  const CandidateSpec nudge{"translation", 0.3, 3.0, 1.0, 1, {0, 1}};
  const DisplacementCertificate c = displacement_check(candidate_hamiltonian(nudge, 1), square, 32);
  std::printf("translation by 0.3: displaced %s, Hofer norm %.4f\n", c.displaced ? "yes" : "no", c.hofer_norm);
  return 0;
}
