#pragma once

#include "symcap/audin_polterovich.hpp"
#include "symcap/kdtree.hpp"
#include "symcap/parallel.hpp"
#include "symcap/sampled_set.hpp"
#include "symcap/smooth_step.hpp"

#include <random>

namespace symcap {

/// u(t, z) on [0, 2k] x S^1 sweeping each generator out to full size and back.
/// z = e^{2 pi i s} is passed as s in [0, 1].
class ConeMap {
 public:
  ConeMap(std::vector<Loop> generators, SmoothStep rho)
      : generators_(std::move(generators)), rho_(std::move(rho)) {
    if (generators_.empty()) throw std::invalid_argument("cone needs at least one generator");
    const Vec base = generators_.front().sample(0).coords();
    for (const Loop& g : generators_) {
      if (g.n() != generators_.front().n()) throw DimensionError("generators differ in dimension");
      if ((g.sample(0).coords() - base).norm() > 1e-9) throw std::invalid_argument("generators must share a base point");
    }
  }

  int k() const { return static_cast<int>(generators_.size()); }
  int n() const { return generators_.front().n(); }
  const std::vector<Loop>& generators() const { return generators_; }
  const SmoothStep& rho() const { return rho_; }

  /// Scale factor rho(...) and generator index at time t.
  std::pair<double, int> profile(double t) const {
    t = std::clamp(t, 0.0, 2.0 * k());
    const int i = std::min(k(), static_cast<int>(std::floor(t / 2.0)) + 1);
    const double local = t - 2.0 * i + 2.0;
    return {local <= 1.0 ? rho_(local) : rho_(2.0 - local), i - 1};
  }

  PhasePoint operator()(double t, double s) const {
    const auto [scale, i] = profile(t);
    PhasePoint x = generators_[i](s);
    x.coords() *= scale;
    return x;
  }

 private:
  std::vector<Loop> generators_;
  SmoothStep rho_;
};

inline ConeMap build_cone(std::vector<Loop> generators, double delta = 0.1) {
  return ConeMap(std::move(generators), SmoothStep(delta));
}

/// u on S^2 with polar angle theta = pi t / (2k) and azimuth 2 pi s.
inline std::function<PhasePoint(const Vec&)> sphere_map(const ConeMap& cone) {
  const double d = cone.rho().delta();
  for (double s : {0.0, 0.25, 0.5, 0.75})
    for (double t : {0.0, 0.5 * d, 2.0 * cone.k() - 0.5 * d, 2.0 * cone.k()})
      if (cone(t, s).norm() != 0.0) throw std::logic_error("cone is not constant near its ends");
  return [cone](const Vec& v) {
    if (v.size() != 3) throw DimensionError("sphere_map takes a point of S^2");
    const double theta = std::acos(std::clamp(v[2] / v.norm(), -1.0, 1.0));
    double s = std::atan2(v[1], v[0]) / (2 * pi);
    if (s < 0) s += 1.0;
    return cone(2.0 * cone.k() * theta / pi, s);
  };
}

struct XOptions {
  int phi_samples = 256;
  /// Points per great circle of S^{n-1}; the sphere net spacing follows from it.
  int sphere_samples = 256;
  int cone_radial = 512;
  int cone_angular = 512;
  int fill_probes = 2000;
  double delta = 0.1;
  std::uint64_t seed = 1;
};

/// Unit vectors covering S^{n-1} at roughly the spacing of `per_circle`
/// points on a great circle.
inline std::vector<Vec> sphere_net(int n, int per_circle, std::uint64_t seed) {
  std::vector<Vec> out;
  if (n == 2) {
    for (int l = 0; l < per_circle; ++l) {
      const double a = 2 * pi * l / per_circle;
      out.push_back((Vec(2) << std::cos(a), std::sin(a)).finished());
    }
    return out;
  }
  const double spacing = 2 * pi / per_circle;
  if (n == 3) {
    const int count = std::max(8, static_cast<int>(std::lround(4 * pi / (spacing * spacing))));
    const double golden = pi * (1.0 + std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count, r = std::sqrt(1.0 - z * z), a = golden * (i + 0.5);
      out.push_back((Vec(3) << r * std::cos(a), r * std::sin(a), z).finished());
    }
    return out;
  }
  const double area = 2 * std::pow(pi, n / 2.0) / std::tgamma(n / 2.0);
  const auto count = static_cast<std::size_t>(std::ceil(area / std::pow(spacing, n - 1)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t i = 0; i < count; ++i) {
    Vec v(n);
    for (int j = 0; j < n; ++j) v[j] = gauss(rng);
    out.push_back(v.normalized());
  }
  return out;
}

/// Parameters in [0, 1) evenly spaced in arclength along the loop.
inline std::vector<double> arclength_parameters(const Loop& g, int count) {
  const int m = g.size();
  std::vector<double> cum(m + 1, 0.0);
  for (int i = 1; i <= m; ++i) cum[i] = cum[i - 1] + (g.grid().col(i) - g.grid().col(i - 1)).norm();
  std::vector<double> out(count);
  int seg = 0;
  for (int l = 0; l < count; ++l) {
    const double target = cum[m] * l / count;
    while (seg < m - 1 && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double frac = len > 0 ? (target - cum[seg]) / len : 0.0;
    out[l] = (seg + frac) / m;
  }
  return out;
}

/// L-tilde (rotated Lagrangian) joined with the cone over its generators;
/// permuted by Psi when n is odd.
inline SampledSet assemble_X(int n, const XOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("assemble_X needs n >= 2");
  const APLagrangian model = APLagrangian::rotated(n);
  const ConeMap cone = build_cone(cone_generators(model), opt.delta);
  const bool odd = n % 2 == 1;
  auto finish = [odd](const PhasePoint& x) { return odd ? permute_psi(x) : x; };

  const std::vector<Vec> net = sphere_net(n, opt.sphere_samples, opt.seed);
  SampledSet set(n);
  set.part_names = {"lagrangian", "cone"};
  const std::size_t lag_count = static_cast<std::size_t>(opt.phi_samples) * net.size();
  const std::size_t cone_count = static_cast<std::size_t>(cone.k()) * opt.cone_radial * opt.cone_angular;
  set.data.resize((lag_count + cone_count) * 2 * n);
  set.part.resize(lag_count + cone_count);

  auto store = [&](std::size_t idx, const PhasePoint& x, std::uint8_t label) {
    std::copy(x.coords().data(), x.coords().data() + 2 * n, set.data.begin() + idx * 2 * n);
    set.part[idx] = label;
  };
  parallel_for(static_cast<std::size_t>(opt.phi_samples), [&](std::size_t i) {
    const double phi = pi * static_cast<double>(i) / opt.phi_samples;
    for (std::size_t l = 0; l < net.size(); ++l) store(i * net.size() + l, finish(sample(model, phi, net[l])), 0);
  });

  const double radial_den = std::max(1, opt.cone_radial - 1);
  for (int g = 0; g < cone.k(); ++g) {
    const std::vector<double> params = arclength_parameters(cone.generators()[g], opt.cone_angular);
    const SmoothStep& rho = cone.rho();
    parallel_for(static_cast<std::size_t>(opt.cone_radial), [&](std::size_t j) {
      const double t = 2.0 * g + rho.inverse(static_cast<double>(j) / radial_den);
      const std::size_t base = lag_count + (static_cast<std::size_t>(g) * opt.cone_radial + j) * opt.cone_angular;
      for (int l = 0; l < opt.cone_angular; ++l) store(base + l, finish(cone(t, params[l])), 1);
    });
  }

  if (opt.fill_probes > 0) {
    const KdTree tree(set.data.data(), set.size(), set.dim());
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss;
    double fill = 0.0;
    for (int k = 0; k < opt.fill_probes; ++k) {
      PhasePoint x;
      if (k % 2 == 0) {
        Vec q(n);
        for (int j = 0; j < n; ++j) q[j] = gauss(rng);
        x = sample(model, pi * unif(rng), q.normalized());
      } else {
        const int g = static_cast<int>(unif(rng) * cone.k()) % cone.k();
        x = cone(2.0 * g + cone.rho().inverse(unif(rng)), unif(rng));
      }
      x = finish(x);
      fill = std::max(fill, tree.nearest(x.coords().data()).distance);
    }
    set.fill_distance = fill;
  }
  return set;
}

}  // namespace symcap
