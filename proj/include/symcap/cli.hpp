#pragma once

#include "symcap/audin_polterovich.hpp"
#include "symcap/cone.hpp"
#include "symcap/core.hpp"
#include "symcap/hamiltonian.hpp"
#include "symcap/moser.hpp"
#include "symcap/sampled_set.hpp"
#include "symcap/set_analysis.hpp"
#include "symcap/spectrum.hpp"
#include "symcap/squeeze.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace symcap {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"spectrum", "build-x", "dimension", "ledger", "gcd-sweep",
                                              "embed2d",  "squeeze", "energy",    "all"};
  return names;
}

struct RunConfig {
  std::string suite = "all";
  int n = 2;
  int loop_samples = 2048;
  int random_loops = 100;
  int grid = 512;
  int levels = 8;
  int flow_steps = 64;
  int gcd_resolution = 10000;
  /// Zero picks the per-dimension default density.
  int phi_samples = 0;
  int sphere_samples = 0;
  int cone_samples = 0;
  double area_tolerance = 1e-6;
  double jacobian_tolerance = 1e-4;
  double witness_r = 0.99;
  std::uint64_t seed = 1;
  std::string out = "symcap_out";
  std::string candidates;
  bool svg = true;

  void validate() const {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
      throw ConfigError("unknown suite '" + suite + "'");
    if (n < 2) throw ConfigError("n must be at least 2");
    for (auto [name, v] : {std::pair{"loop_samples", loop_samples}, {"random_loops", random_loops}, {"grid", grid},
                           {"levels", levels}, {"flow_steps", flow_steps}, {"gcd_resolution", gcd_resolution}})
      if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
    if (phi_samples < 0 || sphere_samples < 0 || cone_samples < 0) throw ConfigError("sample counts must be positive");
    if (levels < 4) throw ConfigError("levels must be at least 4");
    if (grid < 16) throw ConfigError("grid must be at least 16");
    if (!(area_tolerance > 0 && jacobian_tolerance > 0)) throw ConfigError("tolerances must be positive");
    if (!(witness_r > 0 && witness_r < 1)) throw ConfigError("witness_r must lie in (0, 1)");
    if (out.empty()) throw ConfigError("output directory is empty");
  }
};

/// Applies `key = value` lines ('#' comments) on top of `cfg`.
inline void apply_config(RunConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto as_int = [&] {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": '" + key + "' needs an integer");
      return v;
    };
    auto as_double = [&] {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": '" + key + "' needs a number");
      return v;
    };
    if (key == "suite") cfg.suite = value;
    else if (key == "n") cfg.n = as_int();
    else if (key == "loop_samples") cfg.loop_samples = as_int();
    else if (key == "random_loops") cfg.random_loops = as_int();
    else if (key == "grid") cfg.grid = as_int();
    else if (key == "levels") cfg.levels = as_int();
    else if (key == "flow_steps") cfg.flow_steps = as_int();
    else if (key == "gcd_resolution") cfg.gcd_resolution = as_int();
    else if (key == "phi_samples") cfg.phi_samples = as_int();
    else if (key == "sphere_samples") cfg.sphere_samples = as_int();
    else if (key == "cone_samples") cfg.cone_samples = as_int();
    else if (key == "area_tolerance") cfg.area_tolerance = as_double();
    else if (key == "jacobian_tolerance") cfg.jacobian_tolerance = as_double();
    else if (key == "witness_r") cfg.witness_r = as_double();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int());
    else if (key == "out") cfg.out = value;
    else if (key == "candidates") cfg.candidates = value;
    else if (key == "svg") {
      if (value != "true" && value != "false")
        throw ConfigError("config line " + std::to_string(lineno) + ": svg must be true or false");
      cfg.svg = value == "true";
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

struct Check {
  std::string name;
  std::string anchor;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::string> files;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

namespace detail {

inline Check near(std::string name, std::string anchor, double value, double expected, double tol,
                  std::string detail = {}) {
  return {std::move(name), std::move(anchor), value, expected, tol, std::abs(value - expected) <= tol, std::move(detail)};
}
inline Check at_most(std::string name, std::string anchor, double value, double bound, std::string detail = {}) {
  return {std::move(name), std::move(anchor), value, bound, 0.0, value <= bound, std::move(detail)};
}
inline Check at_least(std::string name, std::string anchor, double value, double bound, std::string detail = {}) {
  return {std::move(name), std::move(anchor), value, bound, 0.0, value >= bound, std::move(detail)};
}
inline Check holds(std::string name, std::string anchor, bool ok, std::string detail = {}) {
  return {std::move(name), std::move(anchor), ok ? 1.0 : 0.0, 1.0, 0.0, ok, std::move(detail)};
}

class Svg {
 public:
  Svg(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1;
    if (y1_ <= y0_) y1_ = y0_ + 1;
  }
  double sx(double x) const { return 60 + (x - x0_) / (x1_ - x0_) * 520; }
  double sy(double y) const { return 400 - (y - y0_) / (y1_ - y0_) * 360; }
  void dot(double x, double y, const char* color = "#1f77b4") {
    body_ << "<circle cx='" << sx(x) << "' cy='" << sy(y) << "' r='3' fill='" << color << "'/>\n";
  }
  void line(double xa, double ya, double xb, double yb, const char* color = "#d62728") {
    body_ << "<line x1='" << sx(xa) << "' y1='" << sy(ya) << "' x2='" << sx(xb) << "' y2='" << sy(yb)
          << "' stroke='" << color << "' stroke-width='1.5'/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const char* color = "#1f77b4") {
    body_ << "<polyline fill='none' stroke='" << color << "' stroke-width='1' points='";
    for (auto [x, y] : pts) body_ << sx(x) << ',' << sy(y) << ' ';
    body_ << "'/>\n";
  }
  void bar(double xa, double xb, double h) {
    body_ << "<rect x='" << sx(xa) << "' y='" << sy(h) << "' width='" << std::max(0.5, sx(xb) - sx(xa))
          << "' height='" << sy(y0_) - sy(h) << "' fill='#1f77b4'/>\n";
  }
  void save(const std::string& path, const std::string& title, const std::string& xlabel,
            const std::string& ylabel) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='600' height='440'>\n"
        << "<rect width='600' height='440' fill='white'/>\n"
        << "<text x='300' y='20' text-anchor='middle' font-size='14'>" << title << "</text>\n"
        << "<text x='320' y='432' text-anchor='middle' font-size='12'>" << xlabel << "</text>\n"
        << "<text x='14' y='220' font-size='12' transform='rotate(-90 14 220)'>" << ylabel << "</text>\n"
        << "<rect x='60' y='40' width='520' height='360' fill='none' stroke='black'/>\n"
        << "<text x='60' y='415' font-size='10'>" << x0_ << "</text>\n"
        << "<text x='580' y='415' font-size='10' text-anchor='end'>" << x1_ << "</text>\n"
        << "<text x='56' y='400' font-size='10' text-anchor='end'>" << y0_ << "</text>\n"
        << "<text x='56' y='44' font-size='10' text-anchor='end'>" << y1_ << "</text>\n"
        << body_.str() << "</svg>\n";
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::ostringstream body_;
};

inline std::string write_text(SuiteReport& rep, const RunConfig& cfg, const std::string& name,
                              const std::string& text) {
  const auto path = (std::filesystem::path(cfg.out) / name).string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  rep.files.push_back(name);
  return path;
}

inline XOptions x_density(const RunConfig& cfg, bool heavy) {
  XOptions o;
  o.seed = cfg.seed;
  if (cfg.n == 2) {
    o.phi_samples = heavy ? 1024 : 128;
    o.sphere_samples = heavy ? 2048 : 128;
    o.cone_radial = o.cone_angular = heavy ? 1448 : 256;
  } else if (cfg.n == 3) {
    o.phi_samples = heavy ? 192 : 96;
    o.sphere_samples = heavy ? 340 : 64;
    o.cone_radial = o.cone_angular = heavy ? 512 : 128;
  } else {
    o.phi_samples = 32;
    o.sphere_samples = 16;
    o.cone_radial = o.cone_angular = 128;
  }
  if (cfg.phi_samples > 0) o.phi_samples = cfg.phi_samples;
  if (cfg.sphere_samples > 0) o.sphere_samples = cfg.sphere_samples;
  if (cfg.cone_samples > 0) o.cone_radial = o.cone_angular = cfg.cone_samples;
  return o;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

inline SuiteReport suite_spectrum(const RunConfig& cfg) {
  using detail::near;
  SuiteReport rep{"spectrum", {}, {}};
  const double tol = cfg.area_tolerance;
  const APLagrangian plain = APLagrangian::plain(cfg.n), rotated = APLagrangian::rotated(cfg.n);
  std::ostringstream csv;
  csv.precision(17);
  csv << "model,loop,winding,area,expected\n";

  const double half = liouville_integral(generator_loop(plain, Generator::half, cfg.loop_samples));
  rep.checks.push_back(near("half-turn loop area on L", "equals pi/2", half, pi / 2, tol));
  csv << "L,half,1," << half << ',' << pi / 2 << '\n';
  const double fiber = liouville_integral(generator_loop(plain, Generator::fiber, cfg.loop_samples));
  rep.checks.push_back(near("fiber loop area on L", "winding 0 loops have zero area", fiber, 0.0, tol));
  csv << "L,fiber,0," << fiber << ",0\n";

  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0;
  int lift_failures = 0;
  for (int k = -4; k <= 4; ++k)
    for (int i = 0; i < cfg.random_loops; ++i) {
      const Loop loop = random_lifted_loop(plain, k, rng, cfg.loop_samples);
      const double area = liouville_integral(loop);
      worst = std::max(worst, std::abs(area - k * pi / 2));
      try {
        if (lift(plain, loop).winding != k) ++lift_failures;
      } catch (const LiftError&) {
        ++lift_failures;
      }
      if (i == 0) csv << "L,random," << k << ',' << area << ',' << k * pi / 2 << '\n';
    }
  rep.checks.push_back(near("random lifted loops have area k pi/2", "area equals k pi/2", worst, 0.0, tol,
                            std::to_string(9 * cfg.random_loops) + " loops, k in -4..4"));
  rep.checks.push_back(near("lift recovers the winding class", "winding number of the lift", lift_failures,
                            0.0, 0.0));

  const double tilde = liouville_integral(generator_loop(rotated, Generator::half, cfg.loop_samples));
  rep.checks.push_back(near("minimal loop area on the rotated Lagrangian", "the right hand side equals pi",
                            tilde, pi, tol));
  rep.checks.push_back(near("spectrum generator of the rotated Lagrangian", "A(L~) = pi",
                            ap_spectrum(rotated.scale, cfg.n).min_positive(), pi, 1e-12));
  csv << "L~,half,1," << tilde << ',' << pi << '\n';

  for (double r : {0.5, 1.0, 2.0}) {
    Loop circle(
        1,
        [r](double s) {
          Vec x(2);
          x << r * std::cos(2 * pi * s), r * std::sin(2 * pi * s);
          return PhasePoint(1, x);
        },
        {}, cfg.loop_samples);
    const double area = liouville_integral(circle);
    rep.checks.push_back(near("circle of radius " + detail::fmt(r) + " encloses pi r^2",
                              "A(T) = pi r^2", area, torus_spectrum(r).min_positive(), tol));
    csv << "circle," << r << ",1," << area << ',' << pi * r * r << '\n';
  }
  rep.checks.push_back(near("sphere spectrum generator", "A(S_r) = pi r^2",
                            sphere_spectrum(0.7).min_positive(), pi * 0.49, 1e-12));
  detail::write_text(rep, cfg, "spectrum.csv", csv.str());
  return rep;
}

inline SuiteReport suite_build_x(const RunConfig& cfg) {
  SuiteReport rep{"build-x", {}, {}};
  const int n = cfg.n;
  const SampledSet X = assemble_X(n, detail::x_density(cfg, false));
  rep.checks.push_back(detail::at_least("sample count", "X = L~ union u(S^2)", static_cast<double>(X.size()), 1e5));
  const ContainmentReport ball = containment(X, BallSpec{2 * pi}, 1e-9);
  rep.checks.push_back(detail::at_most("X inside the ball of radius sqrt 2", "X is contained in B^{2n}(2 pi)",
                                       ball.max_violation, ball.slack));
  PolydiscSpec poly = PolydiscSpec::unit(n);
  if (n % 2 == 1) poly.radii.back() = unbounded;
  const ContainmentReport pd = containment(X, poly, 1e-9);
  rep.checks.push_back(detail::at_most(n % 2 == 0 ? "all complex coordinates of modulus at most 1"
                                                  : "first n-1 complex coordinates of modulus at most 1 after Psi",
                                       "X is contained in the closure of P_n", pd.max_violation, pd.slack));
  const auto bin = (std::filesystem::path(cfg.out) / "x.bin").string();
  write_point_cloud(X, bin);
  rep.files.push_back("x.bin");
  SampledSet head(n);
  head.part_names = X.part_names;
  const std::size_t keep = std::min<std::size_t>(X.size(), 20000);
  const std::size_t stride = std::max<std::size_t>(1, X.size() / keep);
  for (std::size_t i = 0; i < X.size(); i += stride) head.add(Vec(X.at(i)), X.part[i]);
  write_point_csv(head, (std::filesystem::path(cfg.out) / "x_sample.csv").string());
  rep.files.push_back("x_sample.csv");
  return rep;
}

inline SuiteReport suite_dimension(const RunConfig& cfg) {
  SuiteReport rep{"dimension", {}, {}};
  const double tol = cfg.n == 2 ? 0.15 : 0.2;
  std::ostringstream csv;
  csv.precision(17);
  csv << "set,level,eps,count,in_window\n";
  auto record = [&](const std::string& name, const BoxCountReport& r) {
    for (std::size_t j = 0; j < r.scales.size(); ++j)
      csv << name << ',' << j << ',' << r.scales[j] << ',' << r.counts[j] << ','
          << (static_cast<int>(j) >= r.level_min && static_cast<int>(j) <= r.level_max) << '\n';
  };
  const BoxCountReport curve = box_dimension(calibration_curve(), 12);
  record("curve", curve);
  rep.checks.push_back(detail::near("calibration curve", "a curve has dimension 1", curve.slope, 1.0, 0.1));
  const BoxCountReport square = box_dimension(calibration_square(), 10);
  record("square", square);
  rep.checks.push_back(detail::near("calibration square", "a square has dimension 2", square.slope, 2.0, 0.05));

  const SampledSet X = assemble_X(cfg.n, detail::x_density(cfg, true));
  const BoxCountReport r = box_dimension(X, cfg.levels);
  record("X", r);
  rep.checks.push_back(detail::near("box-count slope of X", "dim X = n", r.slope, cfg.n, tol,
                                    "levels " + std::to_string(r.level_min) + ".." + std::to_string(r.level_max)));
  rep.checks.push_back(detail::at_least("regression fit of X", "r^2 >= 0.99", r.r2, 0.99));
  rep.checks.push_back(detail::holds("scale window", "at least 3 levels between fill and diameter",
                                     r.window_ok));
  detail::write_text(rep, cfg, "boxcount.csv", csv.str());
  if (cfg.svg) {
    double x0 = unbounded, x1 = -unbounded, y0 = unbounded, y1 = -unbounded;
    for (std::size_t j = 0; j < r.scales.size(); ++j) {
      const double x = -std::log(r.scales[j]), y = std::log(static_cast<double>(std::max<std::size_t>(1, r.counts[j])));
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    detail::Svg svg(x0, x1, y0, y1);
    for (std::size_t j = 0; j < r.scales.size(); ++j) {
      const bool in = static_cast<int>(j) >= r.level_min && static_cast<int>(j) <= r.level_max;
      svg.dot(-std::log(r.scales[j]), std::log(static_cast<double>(std::max<std::size_t>(1, r.counts[j]))),
              in ? "#1f77b4" : "#aaaaaa");
    }
    svg.line(x0, r.intercept + r.slope * x0, x1, r.intercept + r.slope * x1);
    svg.save((std::filesystem::path(cfg.out) / "boxcount.svg").string(),
             "box counting, slope " + detail::fmt(r.slope), "log(1/eps)", "log N(eps)");
    rep.files.push_back("boxcount.svg");
  }
  return rep;
}

inline SuiteReport suite_ledger(const RunConfig& cfg) {
  SuiteReport rep{"ledger", {}, {}};
  const CapacityLedger ledger = capacity_ledger(cfg.n, cfg.witness_r);
  const double r = cfg.witness_r;
  for (const LedgerRow& row : ledger.rows) {
    if (row.d == cfg.n) {
      rep.checks.push_back(detail::at_least("Lagrangian lower bound at the witness radius",
                                            "A_Lag(B^{2n}) >= pi/2", row.witness_area, 0.49 * pi));
      rep.checks.push_back(detail::near("Lagrangian witness equals (pi/2) r^2", "A_Lag(B^{2n}) >= pi/2",
                                        row.witness_area, 0.5 * pi * r * r, 1e-12));
    } else if (row.d <= 2 * cfg.n - 3) {
      const double area = coiso_product_area(CoisoProductSpec::balanced(r, cfg.n, row.d));
      rep.checks.push_back(detail::near("coisotropic product area for d = " + std::to_string(row.d),
                                        "A(R^{2n}, omega_0, N) = pi r^2 / 3", area, pi * r * r / 3, 1e-9));
      rep.checks.push_back(detail::near("ledger row for d = " + std::to_string(row.d),
                                        "pi/3 for d in {n+1, ..., 2n-3}", row.lower, pi / 3, 1e-9));
    }
    rep.checks.push_back(detail::at_most("lower bound below the upper bound for d = " + std::to_string(row.d),
                                         "capacities bounded by pi", row.lower, row.upper));
  }
  detail::write_text(rep, cfg, "ledger.csv", ledger.csv());
  return rep;
}

inline SuiteReport suite_gcd_sweep(const RunConfig& cfg) {
  SuiteReport rep{"gcd-sweep", {}, {}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "c,r2,value\n";
  std::vector<std::pair<double, SplitResult>> results;
  for (double c : {0.3, 0.6, 0.9}) {
    const SplitResult s = optimal_split(c, cfg.gcd_resolution);
    const double grid = c / (static_cast<double>(s.max_denominator) * s.max_denominator);
    rep.checks.push_back(detail::near("optimal split r^2 at c = " + detail::fmt(c),
                                      "r^2 = 2c/3", s.r2, 2 * c / 3, grid));
    rep.checks.push_back(detail::near("optimal value at c = " + detail::fmt(c),
                                      "largest (namely equal to c pi/3)", s.value, c * pi / 3, 1e-6));
    for (auto [x, v] : s.curve) csv << c << ',' << x << ',' << v << '\n';
    results.emplace_back(c, s);
  }
  detail::write_text(rep, cfg, "gcd_sweep.csv", csv.str());
  if (cfg.svg) {
    detail::Svg svg(0.0, 0.9, 0.0, 0.9 * pi / 3 * 1.05);
    const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728"};
    int k = 0;
    for (const auto& [c, s] : results) {
      for (auto [x, v] : s.curve) svg.dot(x, v, colors[k]);
      ++k;
    }
    svg.save((std::filesystem::path(cfg.out) / "gcd_sweep.svg").string(), "pi gcd(r^2/2, c - r^2) over the split",
             "r^2", "value");
    rep.files.push_back("gcd_sweep.svg");
  }
  return rep;
}

inline SuiteReport suite_embed2d(const RunConfig& cfg) {
  SuiteReport rep{"embed2d", {}, {}};
  const PlanarDomain square = PlanarDomain::rectangle({0.0, 0.0}, 0.5, 0.5);
  VolumeEmbedOptions fine;
  fine.moser.grid = cfg.grid;
  fine.moser.tol = cfg.jacobian_tolerance;
  fine.strict = false;
  VolumeEmbedOptions coarse = fine;
  coarse.moser.grid = std::max(16, cfg.grid / 2);
  const GridMap2D g = volume_embed(square, 1.1, fine);
  const GridMap2D h = volume_embed(square, 1.1, coarse);
  const double dev = g.max_jacobian_deviation(), dev_coarse = h.max_jacobian_deviation();
  rep.checks.push_back(detail::at_most("Jacobian of the square embedding", "volume preserving",
                                       dev, cfg.jacobian_tolerance, "grid " + std::to_string(cfg.grid)));
  const double target = std::sqrt(1.1 / pi);
  rep.checks.push_back(detail::at_most("image inside the disc of area 1.1", "embedding into the ball of volume c",
                                       g.max_image_radius(), target));
  rep.checks.push_back(detail::at_least("refinement gain", "halving the grid spacing",
                                        dev_coarse / dev, 3.0));
  const GridMap2D disc = volume_embed(PlanarDomain::disc({0.3, -0.2}, std::sqrt(1.0 / pi)), 1.1, fine);
  rep.checks.push_back(detail::at_most("disc branch is exact", "homothety case", disc.max_jacobian_deviation(),
                                       1e-12, disc.branch));

  std::vector<double> devs;
  for (std::size_t k = 0; k < g.nodes(); ++k)
    if (g.inside[k]) devs.push_back(g.jacobian[k] - 1.0);
  const int bins = 40;
  const double span = std::max(1e-15, dev);
  std::vector<std::size_t> hist(bins, 0);
  for (double d : devs) hist[std::clamp(static_cast<int>((d + span) / (2 * span) * bins), 0, bins - 1)]++;
  std::ostringstream csv;
  csv.precision(17);
  csv << "bin_lo,bin_hi,count\n";
  for (int b = 0; b < bins; ++b)
    csv << -span + 2 * span * b / bins << ',' << -span + 2 * span * (b + 1) / bins << ',' << hist[b] << '\n';
  detail::write_text(rep, cfg, "jacobian_hist.csv", csv.str());
  if (cfg.svg) {
    detail::Svg svg(-span, span, 0.0, static_cast<double>(*std::max_element(hist.begin(), hist.end())));
    for (int b = 0; b < bins; ++b)
      svg.bar(-span + 2 * span * b / bins, -span + 2 * span * (b + 1) / bins, static_cast<double>(hist[b]));
    svg.save((std::filesystem::path(cfg.out) / "jacobian_hist.svg").string(), "det D(phi) - 1 on the grid",
             "deviation", "nodes");
    rep.files.push_back("jacobian_hist.svg");
  }
  return rep;
}

inline SampledSet squeeze_test_curve(std::size_t count = 4000) {
  SampledSet set(2);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2 * pi * static_cast<double>(k) / static_cast<double>(count);
    Vec x(4);
    x << 0.3 * std::cos(t), std::sin(2 * t), 0.3 * std::sin(t), std::cos(3 * t);
    set.add(x);
  }
  set.fill_distance = nearest_neighbour_spacing(set);
  return set;
}

inline SampledSet squeeze_sphere_curve(std::size_t count = 4000) {
  SampledSet set(2);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2 * pi * static_cast<double>(k) / static_cast<double>(count);
    Vec x(4);
    x << std::cos(t), std::sin(t), 0.3 * std::sin(2 * t), 0.3 * std::cos(3 * t);
    set.add(Vec(x.normalized()));
  }
  set.fill_distance = nearest_neighbour_spacing(set);
  return set;
}

inline SuiteReport suite_squeeze(const RunConfig& cfg) {
  SuiteReport rep{"squeeze", {}, {}};
  SqueezeOptions opt;
  opt.seed = cfg.seed;
  opt.moser.grid = cfg.grid;
  nlohmann::ordered_json certs = nlohmann::ordered_json::array();
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  auto record = [&](const std::string& label, const SqueezeResult& r) {
    certs.push_back({{"case", label},
                     {"success", r.success},
                     {"route", r.route},
                     {"reason", r.reason},
                     {"target", r.target},
                     {"epsilon", r.epsilon},
                     {"shadow_area", finite(r.shadow_area)},
                     {"neighborhood_area", finite(r.neighborhood_area)},
                     {"branch", r.branch},
                     {"defect", finite(r.defect)},
                     {"image_radius", r.image_radius},
                     {"cylinder_radius", r.cylinder_radius},
                     {"injective", r.injective}});
  };

  SqueezeOptions shadow = opt;
  shadow.route = SqueezeOptions::Route::shadow;
  const SqueezeResult a = squeeze_pipeline(squeeze_test_curve(), 0.5, shadow);
  record("curve into Z(0.5)", a);
  rep.checks.push_back(detail::holds("thin curve squeezed into Z^4(0.5)",
                                     "phi x id embeds X into Z^{2n}(a)", a.success, a.reason));
  rep.checks.push_back(detail::at_most("symplecticity defect, small-shadow route", "symplectic embedding",
                                       a.defect, 1e-5));

  SqueezeOptions rot = opt;
  rot.route = SqueezeOptions::Route::rotation;
  const SqueezeResult b = squeeze_pipeline(squeeze_sphere_curve(), pi, rot);
  record("sphere curve into Z(pi)", b);
  rep.checks.push_back(detail::holds("sphere curve squeezed into Z^4(pi)",
                                     "Psi(X) symplectically embeds into Z^{2n}", b.success, b.reason));
  rep.checks.push_back(detail::at_most("symplecticity defect, rotation route", "symplectic embedding",
                                       b.defect, 1e-5));

  RunConfig light;
  light.seed = cfg.seed;
  const SampledSet X = assemble_X(2, detail::x_density(light, false));
  const SqueezeResult c = squeeze_pipeline(X, pi, opt);
  record("X into Z(pi)", c);
  rep.checks.push_back(detail::holds("squeezing X into Z^4(pi) is not certified",
                                     "X does not embed into Z^{2n}(pi)", !c.success, c.reason));

  detail::write_text(rep, cfg, "squeeze.json", certs.dump(2) + "\n");
  return rep;
}

inline SuiteReport suite_energy(const RunConfig& cfg) {
  SuiteReport rep{"energy", {}, {}};
  const int steps = cfg.flow_steps;
  {
    double worst = 0.0;
    const Hamiltonian H = momentum(2);
    for (const Vec& x : {Vec(Vec::Zero(4)), Vec((Vec(4) << 0.3, -1.2, 2.0, 0.5).finished())}) {
      Vec expected = x;
      expected[0] += 1.0;
      worst = std::max(worst, (flow_end(H, x, steps) - expected).cwiseAbs().maxCoeff());
    }
    rep.checks.push_back(detail::at_most("flow of H = p_1 is the unit translation", "phi_H^t(q, p) = (q + t, p)",
                                         worst, 1e-10));
  }
  {
    const Hamiltonian H = harmonic_oscillator(1);
    const Vec x = (Vec(2) << 1.0, 0.0).finished();
    const Vec y = flow_end(H, x, std::max(steps, 256));
    rep.checks.push_back(detail::at_most("oscillator conserves the radius", "Hamiltonian flows conserve energy",
                                         std::abs(y.norm() - 1.0), 1e-10));
  }
  const SampledSet square = unit_square_samples(200);
  const DisplacementCertificate rect = displacement_check(rectangle_ramp(0.02, 0.02), square, 16);
  rep.checks.push_back(detail::holds("rectangle displaced", "e(rectangle) <= area", rect.displaced,
                                     "separation " + detail::fmt(rect.min_separation)));
  rep.checks.push_back(detail::at_most("rectangle displacement energy", "e(rectangle of area 1) <= 1.1",
                                       rect.hofer_norm, 1.1));

  nlohmann::ordered_json energy;
  try {
    const CylinderProbeReport cyl = cylinder_energy_probe(pi, 3.0);
    rep.checks.push_back(detail::at_most("cylinder displacement overhead", "e(Z^{2n}(a)) <= a",
                                         cyl.best_overhead, 0.25));
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : cyl.sweep)
      rows.push_back({{"delta", r.delta}, {"margin", r.margin}, {"hofer_norm", r.norm}, {"overhead", r.overhead},
                      {"displaced", r.cert.displaced}, {"min_separation", r.cert.min_separation}});
    energy["cylinder"] = rows;
  } catch (const CylinderProbeError& e) {
    rep.checks.push_back(detail::at_most("cylinder displacement overhead", "e(Z^{2n}(a)) <= a",
                                         e.report.best_overhead, 0.25, e.what()));
  }

  std::vector<CandidateSpec> family = default_candidates();
  if (!cfg.candidates.empty()) {
    std::ifstream in(cfg.candidates);
    if (!in) throw ConfigError("cannot open candidate file " + cfg.candidates);
    family = parse_candidates(in);
  }
  const APLagrangian model = APLagrangian::rotated(2);
  SampledSet L(2);
  for (int i = 0; i < 64; ++i)
    for (const Vec& q : sphere_net(2, 64, cfg.seed)) L.add(sample(model, pi * i / 64, q));
  L.fill_distance = nearest_neighbour_spacing(L);
  const CandidateSearchReport search = candidate_search(L, family, 0.9 * pi, 32);
  int below = 0;
  nlohmann::ordered_json cands = nlohmann::ordered_json::array();
  for (const CandidateResult& r : search.results) {
    below += r.below_bound;
    cands.push_back({{"type", r.spec.type}, {"amplitude", r.spec.amplitude}, {"support", r.spec.support},
                     {"cutoff", r.spec.cutoff}, {"seed", r.spec.seed}, {"hofer_norm", r.cert.hofer_norm},
                     {"displaced", r.cert.displaced}, {"min_separation", r.cert.min_separation}});
  }
  energy["candidates"] = cands;
  rep.checks.push_back(detail::holds("no candidate below 0.9 pi displaces L~",
                                     "e(L) >= A(L) = pi (evidence only)", search.consistent,
                                     std::to_string(below) + " of " + std::to_string(search.results.size()) +
                                         " candidates below the bound"));
  detail::write_text(rep, cfg, "energy.json", energy.dump(2) + "\n");
  return rep;
}

inline std::vector<SuiteReport> run_suites(const RunConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out);
  std::vector<SuiteReport> out;
  auto run = [&](const std::string& name) {
    if (name == "spectrum") out.push_back(suite_spectrum(cfg));
    else if (name == "build-x") out.push_back(suite_build_x(cfg));
    else if (name == "dimension") out.push_back(suite_dimension(cfg));
    else if (name == "ledger") out.push_back(suite_ledger(cfg));
    else if (name == "gcd-sweep") out.push_back(suite_gcd_sweep(cfg));
    else if (name == "embed2d") out.push_back(suite_embed2d(cfg));
    else if (name == "squeeze") out.push_back(suite_squeeze(cfg));
    else if (name == "energy") out.push_back(suite_energy(cfg));
  };
  if (cfg.suite == "all") {
    for (const std::string& name : suite_names())
      if (name != "all") run(name);
  } else {
    run(cfg.suite);
  }
  return out;
}

inline nlohmann::ordered_json report_json(const RunConfig& cfg, const std::vector<SuiteReport>& suites,
                                          bool with_timestamp = true) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["suite"] = cfg.suite;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["config"] = {{"loop_samples", cfg.loop_samples}, {"random_loops", cfg.random_loops}, {"grid", cfg.grid},
                 {"levels", cfg.levels},             {"flow_steps", cfg.flow_steps},     {"gcd_resolution", cfg.gcd_resolution},
                 {"area_tolerance", cfg.area_tolerance}, {"jacobian_tolerance", cfg.jacobian_tolerance},
                 {"witness_r", cfg.witness_r}};
  bool all = true;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SuiteReport& s : suites) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const Check& c : s.checks)
      checks.push_back({{"name", c.name}, {"anchor", c.anchor}, {"value", c.value}, {"expected", c.expected},
                        {"tolerance", c.tolerance}, {"pass", c.pass}, {"detail", c.detail}});
    arr.push_back({{"suite", s.suite}, {"pass", s.pass()}, {"checks", checks}, {"files", s.files}});
    all = all && s.pass();
  }
  j["suites"] = arr;
  j["pass"] = all;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
  }
  return j;
}

/// Runs the configured suites, writes report.json, and returns the exit status.
inline int run_suite(const RunConfig& cfg, std::ostream& log) {
  const std::vector<SuiteReport> suites = run_suites(cfg);
  const nlohmann::ordered_json j = report_json(cfg, suites);
  std::ofstream out(std::filesystem::path(cfg.out) / "report.json");
  out << j.dump(2) << '\n';
  for (const SuiteReport& s : suites)
    for (const Check& c : s.checks)
      log << (c.pass ? "PASS " : "FAIL ") << s.suite << ": " << c.name << " = " << detail::fmt(c.value)
          << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  return j["pass"].get<bool>() ? 0 : 1;
}

}  // namespace symcap
