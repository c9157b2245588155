#pragma once

#include "symcap/core.hpp"
#include "symcap/kdtree.hpp"
#include "symcap/parallel.hpp"
#include "symcap/sampled_set.hpp"
#include "symcap/smooth_step.hpp"

#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace symcap {

/// Time-dependent Hamiltonian on R^{2n} vanishing outside a declared ball.
/// An infinite support radius marks a Hamiltonian without compact support,
/// which can be flowed but has no Hofer norm.
struct Hamiltonian {
  int n = 1;
  std::function<double(double, const Vec&)> eval;
  std::function<Vec(double, const Vec&)> gradient;
  Vec support_center;
  double support_radius = unbounded;
  bool autonomous = true;

  bool compact() const { return std::isfinite(support_radius); }

  double operator()(double t, const Vec& x) const { return eval(t, x); }

  Vec grad(double t, const Vec& x) const {
    if (gradient) return gradient(t, x);
    const double h = 1e-6;
    Vec g(x.size()), y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      y[i] = x[i] + h;
      const double up = eval(t, y);
      y[i] = x[i] - h;
      const double down = eval(t, y);
      y[i] = x[i];
      g[i] = (up - down) / (2 * h);
    }
    return g;
  }

  /// X_H with q' = dH/dp, p' = -dH/dq.
  Vec field(double t, const Vec& x) const {
    const Vec g = grad(t, x);
    Vec v(x.size());
    v.head(n) = g.tail(n);
    v.tail(n) = -g.head(n);
    return v;
  }
};

struct FlowBlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FlowPath {
  Vec end;
  std::vector<Vec> path;
};

/// Time-1 flow by RK4 over [t0, t0 + 1].
inline FlowPath flow(const Hamiltonian& H, const Vec& x0, int steps = 256, double budget = 1e6,
                     bool keep_path = true) {
  if (steps <= 0) throw std::invalid_argument("flow needs a positive step count");
  if (x0.size() != 2 * H.n) throw DimensionError("start point dimension differs from the Hamiltonian");
  const double dt = 1.0 / steps;
  FlowPath out;
  Vec x = x0;
  if (keep_path) {
    out.path.reserve(steps + 1);
    out.path.push_back(x);
  }
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Vec k1 = H.field(t, x);
    const Vec k2 = H.field(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Vec k3 = H.field(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Vec k4 = H.field(t + dt, x + dt * k3);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!(x.norm() <= budget)) throw FlowBlowUp("flow left the norm budget");
    if (keep_path) out.path.push_back(x);
  }
  out.end = x;
  return out;
}

inline Vec flow_end(const Hamiltonian& H, const Vec& x0, int steps = 256) {
  return flow(H, x0, steps, 1e6, false).end;
}

inline PhaseMap time_one_map(const Hamiltonian& H, int steps = 256) {
  return [H, steps](const Vec& x) { return flow_end(H, x, steps); };
}

/// Integral over t of (sup - inf) of H(t, .), the sup and inf taken over
/// random probes in the support ball, the value 0 outside it, and a short
/// gradient polish of the extreme probes.
inline double hofer_norm(const Hamiltonian& H, int time_samples = 16, int space_probes = 4000,
                         std::uint64_t seed = 3) {
  if (!H.compact()) throw std::invalid_argument("hofer_norm needs a compactly supported Hamiltonian");
  if (time_samples < 1 || space_probes < 1) throw std::invalid_argument("hofer_norm needs positive sample counts");
  const int dim = 2 * H.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> probes;
  probes.reserve(space_probes + 1);
  probes.push_back(H.support_center);
  for (int k = 0; k < space_probes; ++k) {
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v[j] = gauss(rng);
    const double r = H.support_radius * std::pow(unif(rng), 1.0 / dim);
    probes.push_back(H.support_center + r * v.normalized());
  }

  auto polish = [&](double t, Vec x, double sign) {
    double value = sign * H(t, x);
    double step = 0.05 * H.support_radius;
    for (int it = 0; it < 200 && step > 1e-9 * H.support_radius; ++it) {
      const Vec g = sign * H.grad(t, x);
      const double gn = g.norm();
      if (gn == 0.0) break;
      const Vec y = x + step * g / gn;
      const double vy = sign * H(t, y);
      if (vy > value && (y - H.support_center).norm() <= H.support_radius) {
        x = y;
        value = vy;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    return sign * value;
  };

  const bool steady = H.autonomous;
  const int nt = steady ? 1 : time_samples;
  std::vector<double> osc(nt + 1, 0.0);
  for (int s = 0; s < (steady ? 1 : nt + 1); ++s) {
    const double t = steady ? 0.0 : static_cast<double>(s) / nt;
    std::vector<double> values(probes.size());
    parallel_for(probes.size(), [&](std::size_t i) { values[i] = H(t, probes[i]); });
    std::vector<std::size_t> order(probes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double hi = std::max(0.0, values[order.back()]), lo = std::min(0.0, values[order.front()]);
    const std::size_t polished = std::min<std::size_t>(4, order.size());
    for (std::size_t k = 0; k < polished; ++k) {
      hi = std::max(hi, polish(t, probes[order[order.size() - 1 - k]], 1.0));
      lo = std::min(lo, polish(t, probes[order[k]], -1.0));
    }
    osc[s] = hi - lo;
  }
  if (steady) return osc[0];
  double total = 0.0;
  for (int s = 0; s < nt; ++s) total += 0.5 * (osc[s] + osc[s + 1]) / nt;
  return total;
}

struct DisplacementCertificate {
  double hofer_norm = 0.0;
  bool displaced = false;
  double min_separation = 0.0;
  double threshold = 0.0;
  /// Largest |H(end) - H(start)| over the samples; meaningful for autonomous H.
  double energy_drift = 0.0;
};

/// Flows every sample and compares the flowed cloud with the original one.
inline DisplacementCertificate displacement_check(const Hamiltonian& H, const SampledSet& set, int steps = 64,
                                                  bool with_norm = true) {
  if (set.n != H.n) throw DimensionError("set dimension differs from the Hamiltonian");
  if (set.empty()) throw std::invalid_argument("displacement_check needs a nonempty set");
  const std::size_t count = set.size();
  std::vector<double> moved(count * set.dim());
  std::vector<double> drift(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    const Vec x = set.at(i);
    const Vec y = flow_end(H, x, steps);
    std::copy(y.data(), y.data() + y.size(), moved.begin() + i * set.dim());
    if (H.autonomous) drift[i] = std::abs(H(0.0, y) - H(0.0, x));
  });
  const KdTree tree(set.data.data(), count, set.dim());
  std::vector<double> near(count);
  parallel_for(count, [&](std::size_t i) { near[i] = tree.nearest(moved.data() + i * set.dim()).distance; });

  DisplacementCertificate cert;
  cert.min_separation = *std::min_element(near.begin(), near.end());
  cert.energy_drift = *std::max_element(drift.begin(), drift.end());
  cert.threshold = 2.0 * set.fill_distance;
  cert.displaced = cert.min_separation > cert.threshold;
  if (with_norm && H.compact()) cert.hofer_norm = hofer_norm(H);
  return cert;
}

// ---------------------------------------------------------------------------
// Elementary Hamiltonians.

inline Hamiltonian zero_hamiltonian(int n) {
  Hamiltonian H;
  H.n = n;
  H.eval = [](double, const Vec&) { return 0.0; };
  H.gradient = [n](double, const Vec&) { return Vec(Vec::Zero(2 * n)); };
  H.support_center = Vec::Zero(2 * n);
  H.support_radius = 1.0;
  return H;
}

/// H = p_j, whose flow translates q_j by t.
inline Hamiltonian momentum(int n, int j = 0) {
  Hamiltonian H;
  H.n = n;
  H.eval = [n, j](double, const Vec& x) { return x[n + j]; };
  H.gradient = [n, j](double, const Vec&) {
    Vec g = Vec::Zero(2 * n);
    g[n + j] = 1.0;
    return g;
  };
  H.support_center = Vec::Zero(2 * n);
  return H;
}

inline Hamiltonian harmonic_oscillator(int n) {
  Hamiltonian H;
  H.n = n;
  H.eval = [](double, const Vec& x) { return 0.5 * x.squaredNorm(); };
  H.gradient = [](double, const Vec& x) { return x; };
  H.support_center = Vec::Zero(2 * n);
  return H;
}

/// Radial cutoff: 1 on the ball of radius r around c, 0 outside radius r + w.
struct BallCutoff {
  Vec center;
  double r = 1.0, w = 1.0;
  double value(const Vec& x) const { return plateau((x - center).norm(), -1.0, r, w); }
  Vec gradient(const Vec& x) const {
    const Vec d = x - center;
    const double rho = d.norm();
    if (rho <= r || rho >= r + w) return Vec::Zero(x.size());
    return plateau_derivative(rho, -1.0, r, w) * d / rho;
  }
};

/// c times a smooth bump equal to 1 on the ball of radius r, with range [0, c].
inline Hamiltonian bump_hamiltonian(int n, double c, double r = 1.0, double w = 0.5) {
  const BallCutoff cut{Vec::Zero(2 * n), r, w};
  Hamiltonian H;
  H.n = n;
  H.eval = [cut, c](double, const Vec& x) { return c * cut.value(x); };
  H.gradient = [cut, c](double, const Vec& x) { return Vec(c * cut.gradient(x)); };
  H.support_center = cut.center;
  H.support_radius = r + w;
  return H;
}

/// s H(s t, .), which generates the time-s map of H over unit time.
inline Hamiltonian rescaled(const Hamiltonian& H, double s) {
  Hamiltonian K = H;
  K.eval = [H, s](double t, const Vec& x) { return s * H(s * t, x); };
  K.gradient = [H, s](double t, const Vec& x) { return Vec(s * H.grad(s * t, x)); };
  return K;
}

/// -H(1 - t, .), generating the inverse isotopy.
inline Hamiltonian time_reversed(const Hamiltonian& H) {
  Hamiltonian K = H;
  K.eval = [H](double t, const Vec& x) { return -H(1.0 - t, x); };
  K.gradient = [H](double t, const Vec& x) { return Vec(-H.grad(1.0 - t, x)); };
  return K;
}

// ---------------------------------------------------------------------------
// Ramp Hamiltonians f(q1) g(p1) chi(rest): on the plateau of g and chi the
// flow is the exact shear p1 -> p1 - f'(q1), q1 and the rest fixed.

/// Antiderivative table of a smooth function vanishing outside [lo, hi].
class Antiderivative {
 public:
  Antiderivative() = default;
  Antiderivative(std::function<double(double)> f, double lo, double hi, int panels = 4096)
      : f_(std::move(f)), lo_(lo), hi_(hi), panels_(panels), cum_(panels + 1, 0.0) {
    for (int k = 0; k < panels_; ++k) cum_[k + 1] = cum_[k] + gl_.integrate(f_, edge(k), edge(k + 1));
  }
  double total() const { return cum_.back(); }
  double derivative(double x) const { return (x <= lo_ || x >= hi_) ? 0.0 : f_(x); }
  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return cum_.back();
    const int k = std::min(panels_ - 1, static_cast<int>((x - lo_) / (hi_ - lo_) * panels_));
    return cum_[k] + gl_.integrate(f_, edge(k), x);
  }

 private:
  double edge(int k) const { return lo_ + (hi_ - lo_) * k / panels_; }
  std::function<double(double)> f_;
  double lo_ = 0, hi_ = 0;
  int panels_ = 0;
  std::vector<double> cum_;
  GaussLegendre<8> gl_{};
};

struct RampDesign {
  int n = 1;
  /// Required shift f'(q1) >= 0, supported in [q_lo, q_hi].
  std::function<double(double)> shift;
  double q_lo = 0, q_hi = 1;
  /// Interval of p1 the trajectories must stay in, and the rest radius.
  double p_lo = -1, p_hi = 1;
  double rest_radius = 1.0;
  double cutoff = 0.5;
};

/// f rises by the integral of `shift`, then returns to 0 on a lobe to the
/// right of q_hi, so H ranges over [0, peak].
inline Hamiltonian ramp_hamiltonian(const RampDesign& d) {
  auto up = std::make_shared<Antiderivative>(d.shift, d.q_lo, d.q_hi);
  const double peak = up->total();
  const double lobe_lo = d.q_hi, lobe_hi = d.q_hi + std::max(1.0, d.q_hi - d.q_lo);
  const double mid = 0.5 * (lobe_lo + lobe_hi), half = 0.5 * (lobe_hi - lobe_lo);
  auto bump = [mid, half](double x) {
    const double u = (x - mid) / half;
    return std::abs(u) >= 1 ? 0.0 : std::exp(-1.0 / (1.0 - u * u));
  };
  auto down_shape = std::make_shared<Antiderivative>(bump, lobe_lo, lobe_hi);
  const double norm = peak / down_shape->total();
  auto f = [up, down_shape, norm](double x) { return (*up)(x) - norm * (*down_shape)(x); };
  auto df = [up, down_shape, norm](double x) { return up->derivative(x) - norm * down_shape->derivative(x); };
  const int n = d.n;
  const double plo = d.p_lo, phi = d.p_hi, w = d.cutoff, rr = d.rest_radius;
  auto g = [plo, phi, w](double p) { return plateau(p, plo, phi, w); };
  auto dg = [plo, phi, w](double p) { return plateau_derivative(p, plo, phi, w); };
  auto rest_sq = [n](const Vec& x) {
    double s = 0.0;
    for (int j = 1; j < n; ++j) s += x[j] * x[j] + x[n + j] * x[n + j];
    return s;
  };

  Hamiltonian H;
  H.n = n;
  H.eval = [=](double, const Vec& x) {
    const double fx = f(x[0]);
    if (fx == 0.0) return 0.0;
    return fx * g(x[n]) * plateau(std::sqrt(rest_sq(x)), -1.0, rr, w);
  };
  H.gradient = [=](double, const Vec& x) {
    Vec grad = Vec::Zero(2 * n);
    const double fx = f(x[0]), dfx = df(x[0]);
    if (fx == 0.0 && dfx == 0.0) return grad;
    const double rho = std::sqrt(rest_sq(x));
    const double chi = plateau(rho, -1.0, rr, w), gx = g(x[n]);
    grad[0] = dfx * gx * chi;
    grad[n] = fx * dg(x[n]) * chi;
    if (rho > rr && rho < rr + w && fx != 0.0) {
      const double dchi = plateau_derivative(rho, -1.0, rr, w) * fx * gx / rho;
      for (int j = 1; j < n; ++j) {
        grad[j] = dchi * x[j];
        grad[n + j] = dchi * x[n + j];
      }
    }
    return grad;
  };
  const double qc = 0.5 * (d.q_lo + lobe_hi), pc = 0.5 * (plo + phi);
  H.support_center = Vec::Zero(2 * n);
  H.support_center[0] = qc;
  H.support_center[n] = pc;
  H.support_radius = std::sqrt(std::pow(0.5 * (lobe_hi - d.q_lo), 2) + std::pow(0.5 * (phi - plo) + w, 2) +
                               std::pow(rr + w, 2));
  return H;
}

/// Shear displacing the square (0,1)^2 downward by 1 + delta, the ramp
/// covering (-eps, 1 + eps) with transitions of width eps.
inline Hamiltonian rectangle_ramp(double delta, double eps) {
  RampDesign d;
  d.n = 1;
  d.shift = [delta, eps](double q) { return (1.0 + delta) * plateau(q, 0.0, 1.0, eps); };
  d.q_lo = -eps;
  d.q_hi = 1.0 + eps;
  d.p_lo = -(1.0 + delta) - 0.1;
  d.p_hi = 1.1;
  d.rest_radius = 0.0;
  d.cutoff = 0.5;
  return ramp_hamiltonian(d);
}

/// Samples of the square [0,1]^2 on a regular grid.
inline SampledSet unit_square_samples(int per_side = 200) {
  SampledSet set(1);
  set.reserve(static_cast<std::size_t>(per_side + 1) * (per_side + 1));
  for (int i = 0; i <= per_side; ++i)
    for (int j = 0; j <= per_side; ++j)
      set.add(Vec((Vec(2) << double(i) / per_side, double(j) / per_side).finished()));
  set.fill_distance = std::sqrt(0.5) / per_side;
  return set;
}

/// Chord-following shear for the disc of radius rho: each vertical line
/// moves down by slightly more than its chord, plus a margin near the rim.
inline Hamiltonian disc_ramp(int n, double rho, double delta, double margin, double rest_radius) {
  RampDesign d;
  d.n = n;
  const double m2 = margin * margin;
  d.shift = [rho, delta, m2, margin](double q) {
    const double a = rho * rho - q * q;
    const double positive = 0.5 * (a + std::sqrt(a * a + m2 * m2));
    return 2.0 * (1.0 + delta) * std::sqrt(positive + 0.5 * m2) * plateau(q, -rho, rho, margin);
  };
  d.q_lo = -rho - margin;
  d.q_hi = rho + margin;
  const double max_shift = 2.0 * (1.0 + delta) * std::sqrt(rho * rho + m2);
  d.p_lo = -rho - max_shift - 0.1 * rho;
  d.p_hi = rho + 0.1 * rho;
  d.rest_radius = rest_radius;
  d.cutoff = 0.5 * rho;
  return ramp_hamiltonian(d);
}

/// Samples of the truncated cylinder Z(a) cap B(R): a polar grid of the
/// (q1, p1) disc crossed with a coarse grid of the remaining coordinates.
inline SampledSet truncated_cylinder_samples(int n, double a, double R, int rings = 80, int slices = 6) {
  const double rho = std::sqrt(a / pi);
  if (!(R > rho)) throw std::invalid_argument("truncation radius must exceed the disc radius");
  std::vector<Eigen::Vector2d> disc;
  const double dr = rho / rings;
  disc.push_back(Eigen::Vector2d::Zero());
  for (int k = 1; k <= rings; ++k) {
    const double r = k * dr;
    const int m = static_cast<int>(std::ceil(2 * pi * r / dr));
    for (int l = 0; l < m; ++l) disc.emplace_back(r * std::cos(2 * pi * l / m), r * std::sin(2 * pi * l / m));
  }
  std::vector<Vec> rest{Vec::Zero(2 * (n - 1))};
  if (n > 1) {
    const double extent = std::sqrt(R * R - rho * rho);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < slices; ++k) {
      Vec v(2 * (n - 1));
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = gauss(rng);
      rest.push_back(extent * std::pow(unif(rng), 1.0 / v.size()) * v.normalized());
    }
  }
  SampledSet set(n);
  set.reserve(disc.size() * rest.size());
  for (const Vec& r : rest)
    for (const Eigen::Vector2d& z : disc) {
      Vec x = Vec::Zero(2 * n);
      x[0] = z.x();
      x[n] = z.y();
      for (int j = 1; j < n; ++j) {
        x[j] = r[2 * (j - 1)];
        x[n + j] = r[2 * (j - 1) + 1];
      }
      if (x.norm() < R) set.add(x);
    }
  set.fill_distance = dr;
  return set;
}

struct CylinderSweepRow {
  double delta = 0.0, margin = 0.0;
  double norm = 0.0;
  double overhead = 0.0;
  DisplacementCertificate cert;
};

struct CylinderProbeReport {
  double area = 0.0, truncation = 0.0;
  std::vector<CylinderSweepRow> sweep;
  bool achieved = false;
  double best_overhead = unbounded;
};

/// Sweeps the chord-ramp construction over shrinking overheads. Throws when
/// no displacing run meets `target_overhead`, carrying the best one found.
struct CylinderProbeError : std::runtime_error {
  CylinderProbeReport report;
  CylinderProbeError(const std::string& what, CylinderProbeReport r) : std::runtime_error(what), report(std::move(r)) {}
};

inline CylinderProbeReport cylinder_energy_probe(double a, double R, double target_overhead = 0.25, int n = 2,
                                                 int rings = 80) {
  if (!(a > 0 && R > 0)) throw std::invalid_argument("cylinder probe needs a, R > 0");
  if (!(target_overhead > 0)) throw std::invalid_argument("zero overhead is not reachable by a ramp construction");
  const double rho = std::sqrt(a / pi);
  const SampledSet set = truncated_cylinder_samples(n, a, R, rings);
  CylinderProbeReport rep;
  rep.area = a;
  rep.truncation = R;
  const std::pair<double, double> sweep[] = {{0.2, 0.4}, {0.1, 0.3}, {0.05, 0.2}, {0.02, 0.1}};
  for (const auto& [delta, margin] : sweep) {
    CylinderSweepRow row;
    row.delta = delta;
    row.margin = margin * rho;
    const Hamiltonian H = disc_ramp(n, rho, row.delta, row.margin, R);
    row.cert = displacement_check(H, set, 4, false);
    row.norm = hofer_norm(H);
    row.cert.hofer_norm = row.norm;
    row.overhead = row.norm / a - 1.0;
    if (row.cert.displaced && row.overhead <= target_overhead) {
      rep.achieved = true;
      rep.best_overhead = std::min(rep.best_overhead, row.overhead);
    }
    rep.sweep.push_back(row);
  }
  if (!rep.achieved) {
    for (const CylinderSweepRow& row : rep.sweep)
      if (row.cert.displaced) rep.best_overhead = std::min(rep.best_overhead, row.overhead);
    throw CylinderProbeError("displacement not achieved at the requested overhead", rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Candidate displacing Hamiltonians.

struct CandidateSpec {
  std::string type = "translation";
  double amplitude = 0.5;
  double support = 3.0;
  double cutoff = 1.0;
  std::uint64_t seed = 1;
  /// Empty means derived from the seed.
  std::vector<double> direction;
};

/// One candidate per nonblank line: whitespace-separated key=value pairs
/// with keys type, amplitude, support, cutoff, seed. '#' starts a comment.
inline std::vector<CandidateSpec> parse_candidates(std::istream& in) {
  std::vector<CandidateSpec> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    CandidateSpec c;
    bool any = false;
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key=value, got '" + word + "'");
      const std::string key = word.substr(0, eq), value = word.substr(eq + 1);
      try {
        if (key == "type") c.type = value;
        else if (key == "amplitude") c.amplitude = std::stod(value);
        else if (key == "support") c.support = std::stod(value);
        else if (key == "cutoff") c.cutoff = std::stod(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else throw std::invalid_argument("unknown key");
      } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": bad entry '" + word + "'");
      }
      any = true;
    }
    if (!any) continue;
    if (c.type != "translation" && c.type != "shear" && c.type != "ramp" && c.type != "fourier")
      throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown candidate type '" + c.type + "'");
    if (!(c.support > 0 && c.cutoff > 0)) throw std::invalid_argument("line " + std::to_string(lineno) + ": radii must be positive");
    out.push_back(c);
  }
  return out;
}

/// Candidate family shipped with the toolkit.
inline std::vector<CandidateSpec> default_candidates() {
  std::vector<CandidateSpec> out;
  std::uint64_t seed = 1;
  for (const char* type : {"translation", "shear", "ramp", "fourier"})
    for (double amp : {0.1, 0.2, 0.35, 0.5, 1.0, 2.0}) out.push_back({type, amp, 2.0, 1.0, seed++, {}});
  // Large translations that do displace, far above the bound.
  for (double amp : {3.5, 5.0}) out.push_back({"translation", amp, 6.0, 1.0, seed++, {}});
  return out;
}

/// Builds the Hamiltonian of a candidate in R^{2n}, cut off to the ball
/// of radius support + cutoff about the origin.
inline Hamiltonian candidate_hamiltonian(const CandidateSpec& c, int n) {
  const int dim = 2 * n;
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 2 * pi);
  auto random_unit = [&] {
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v[j] = gauss(rng);
    return Vec(v.normalized());
  };
  const BallCutoff cut{Vec::Zero(dim), c.support, c.cutoff};
  Hamiltonian H;
  H.n = n;
  H.support_center = Vec::Zero(dim);
  H.support_radius = c.support + c.cutoff;

  std::function<double(double, const Vec&)> core;
  std::function<Vec(double, const Vec&)> core_grad;
  if (c.type == "translation") {
    Vec v = c.direction.empty() ? random_unit() : Eigen::Map<const Vec>(c.direction.data(), dim).normalized();
    const Mat J = standard_j(n);
    // <Jv, x> generates translation by v (up to the sign convention).
    const Vec w = c.amplitude * (J * v);
    core = [w](double, const Vec& x) { return w.dot(x); };
    core_grad = [w](double, const Vec&) { return w; };
  } else if (c.type == "shear") {
    const Vec u = random_unit();
    core = [u, a = c.amplitude](double, const Vec& x) { return 0.5 * a * u.dot(x) * u.dot(x); };
    core_grad = [u, a = c.amplitude](double, const Vec& x) { return Vec(a * u.dot(x) * u); };
  } else if (c.type == "ramp") {
    const Vec u = random_unit();
    core = [u, a = c.amplitude](double, const Vec& x) { return a * std::tanh(u.dot(x)); };
    core_grad = [u, a = c.amplitude](double, const Vec& x) {
      const double th = std::tanh(u.dot(x));
      return Vec(a * (1.0 - th * th) * u);
    };
  } else if (c.type == "fourier") {
    const int modes = 4;
    std::vector<Vec> k(modes);
    std::vector<double> w(modes), phase(modes), coef(modes);
    for (int m = 0; m < modes; ++m) {
      k[m] = (1.0 + m) * random_unit();
      w[m] = 2 * pi * (m % 2 == 0 ? 1.0 : -1.0);
      phase[m] = unif(rng);
      coef[m] = c.amplitude / modes;
    }
    core = [=](double t, const Vec& x) {
      double s = 0.0;
      for (int m = 0; m < modes; ++m) s += coef[m] * std::sin(k[m].dot(x) + w[m] * t + phase[m]);
      return s;
    };
    core_grad = [=](double t, const Vec& x) {
      Vec g = Vec::Zero(x.size());
      for (int m = 0; m < modes; ++m) g += coef[m] * std::cos(k[m].dot(x) + w[m] * t + phase[m]) * k[m];
      return g;
    };
    H.autonomous = false;
  } else {
    throw std::invalid_argument("unknown candidate type '" + c.type + "'");
  }
  H.eval = [core, cut](double t, const Vec& x) {
    const double chi = cut.value(x);
    return chi == 0.0 ? 0.0 : chi * core(t, x);
  };
  H.gradient = [core, core_grad, cut](double t, const Vec& x) {
    const double chi = cut.value(x);
    if (chi == 0.0) return Vec(Vec::Zero(x.size()));
    return Vec(chi * core_grad(t, x) + core(t, x) * cut.gradient(x));
  };
  return H;
}

struct CandidateResult {
  CandidateSpec spec;
  DisplacementCertificate cert;
  bool below_bound = false;
};

struct CandidateSearchReport {
  double bound = 0.0;
  std::vector<CandidateResult> results;
  /// No candidate with norm below the bound displaced the set.
  bool consistent = true;
};

inline CandidateSearchReport candidate_search(const SampledSet& set, const std::vector<CandidateSpec>& family,
                                              double bound, int steps = 32) {
  CandidateSearchReport rep;
  rep.bound = bound;
  for (const CandidateSpec& c : family) {
    const Hamiltonian H = candidate_hamiltonian(c, set.n);
    CandidateResult r;
    r.spec = c;
    r.cert = displacement_check(H, set, steps, false);
    r.cert.hofer_norm = hofer_norm(H, 16, 2000, c.seed);
    r.below_bound = r.cert.hofer_norm < bound;
    if (r.below_bound && r.cert.displaced) rep.consistent = false;
    rep.results.push_back(r);
  }
  return rep;
}

}  // namespace symcap
