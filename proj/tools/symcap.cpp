#include "symcap/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  symcap::RunConfig cfg;
  CLI::App app{"Verification suites for symplectic capacity computations"};
  std::string suite = "all", config_path;
  app.add_option("suite", suite, "spectrum | build-x | dimension | ledger | gcd-sweep | embed2d | squeeze | energy | all");
  app.add_option("--n", cfg.n, "half-dimension");
  app.add_option("--levels", cfg.levels, "box-counting levels");
  app.add_option("--grid", cfg.grid, "Moser grid size");
  app.add_option("--steps", cfg.flow_steps, "Hamiltonian flow steps");
  app.add_option("--loop-samples", cfg.loop_samples, "samples per loop");
  app.add_option("--random-loops", cfg.random_loops, "random loops per winding class");
  app.add_option("--gcd-resolution", cfg.gcd_resolution, "grid points for the gcd sweep");
  app.add_option("--phi-samples", cfg.phi_samples, "phase samples of the Lagrangian");
  app.add_option("--sphere-samples", cfg.sphere_samples, "sphere net density");
  app.add_option("--cone-samples", cfg.cone_samples, "radial and angular cone samples");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--candidates", cfg.candidates, "candidate Hamiltonian family file");
  app.add_option("--config", config_path, "key = value file overriding the flags");
  bool no_svg = false;
  app.add_flag("--no-svg", no_svg, "skip SVG plots");
  CLI11_PARSE(app, argc, argv);
  cfg.suite = suite;
  cfg.svg = !no_svg;

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw symcap::ConfigError("cannot open config file " + config_path);
      symcap::apply_config(cfg, in);
    }
    cfg.validate();
    return symcap::run_suite(cfg, std::cout);
  } catch (const symcap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
