#pragma once

#include "symcap/core.hpp"
#include "symcap/kdtree.hpp"
#include "symcap/sampled_set.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace symcap {

struct BoxCountReport {
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  int level_min = 0;
  int level_max = 0;
  double diameter = 0.0;
  double fill_distance = 0.0;
  bool degenerate = false;
  /// False when the valid window had fewer than three scales and a fallback was fitted.
  bool window_ok = true;
};

struct BoxCountOptions {
  /// Largest scale in the fit, as a fraction of the bounding-box extent.
  double upper_fraction = 0.125;
  /// Smallest scale in the fit, as a multiple of the fill distance.
  double fill_factor = 4.0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct LineFit {
  double slope, intercept, r2;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  const double r2 = (sxx > 0 && syy > 0) ? sxy * sxy / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2};
}

}  // namespace detail

/// Occupied boxes at eps = D / 2^j for j = 0..levels, D the largest bounding-box
/// extent, and the least-squares slope of log N against log(1/eps) over the
/// scales between fill_factor * fill and upper_fraction * D.
inline BoxCountReport box_dimension(const SampledSet& set, int levels, BoxCountOptions opt = {}) {
  if (levels < 4) throw std::invalid_argument("box_dimension needs at least 4 levels");
  if (!(set.fill_distance > 0.0) && set.size() > 1)
    throw std::invalid_argument("box_dimension needs a fill-distance estimate");
  BoxCountReport rep;
  rep.fill_distance = set.fill_distance;
  const int dim = set.dim();
  const std::size_t count = set.size();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < count; ++i)
    for (int c = 0; c < dim; ++c) {
      lo[c] = std::min(lo[c], set.data[i * dim + c]);
      hi[c] = std::max(hi[c], set.data[i * dim + c]);
    }
  double extent = 0.0;
  for (int c = 0; c < dim; ++c) extent = std::max(extent, hi[c] - lo[c]);
  rep.diameter = extent;
  if (count < 2 || extent <= 0.0) {
    rep.degenerate = true;
    for (int j = 0; j <= levels; ++j) {
      rep.scales.push_back(std::ldexp(1.0, -j));
      rep.counts.push_back(count == 0 ? 0 : 1);
    }
    return rep;
  }

  std::vector<std::uint64_t> keys(count);
  for (int j = 0; j <= levels; ++j) {
    const std::int64_t cells = std::int64_t{1} << j;
    const double eps = extent / static_cast<double>(cells);
    const bool packed = j * dim <= 64;
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t key = 0;
      for (int c = 0; c < dim; ++c) {
        auto idx = static_cast<std::int64_t>(std::floor((set.data[i * dim + c] - lo[c]) / eps));
        idx = std::clamp<std::int64_t>(idx, 0, cells - 1);
        key = packed ? (j == 0 ? 0 : (key << j) | static_cast<std::uint64_t>(idx))
                     : detail::mix64(key ^ static_cast<std::uint64_t>(idx));
      }
      keys[i] = key;
    }
    std::sort(keys.begin(), keys.end());
    const auto occupied = static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    rep.scales.push_back(eps);
    rep.counts.push_back(occupied);
  }

  std::vector<double> x, y;
  auto collect = [&](auto accept) {
    x.clear();
    y.clear();
    rep.level_min = -1;
    for (int j = 0; j <= levels; ++j) {
      if (!accept(j)) continue;
      if (rep.level_min < 0) rep.level_min = j;
      rep.level_max = j;
      x.push_back(-std::log(rep.scales[j]));
      y.push_back(std::log(static_cast<double>(rep.counts[j])));
    }
  };
  collect([&](int j) {
    return rep.scales[j] <= opt.upper_fraction * extent * (1 + 1e-12) &&
           rep.scales[j] >= opt.fill_factor * set.fill_distance;
  });
  if (x.size() < 3) {
    rep.window_ok = false;
    collect([&](int j) { return rep.scales[j] <= 0.25 * extent * (1 + 1e-12); });
  }
  const auto fit = detail::least_squares(x, y);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r2 = fit.r2;
  rep.eps_max = rep.scales[rep.level_min];
  rep.eps_min = rep.scales[rep.level_max];
  return rep;
}

/// Smooth closed curve in R^4 sampled uniformly in its parameter.
inline SampledSet calibration_curve(std::size_t count = 1 << 20) {
  SampledSet set(2);
  set.reserve(count);
  double step = 0.0;
  Vec prev;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = 2 * pi * static_cast<double>(k) / static_cast<double>(count);
    Vec x(4);
    x << std::cos(t), 0.5 * std::cos(3 * t), std::sin(t), 0.5 * std::sin(2 * t);
    if (k > 0) step = std::max(step, (x - prev).norm());
    prev = x;
    set.add(x);
  }
  set.fill_distance = 0.5 * step;
  return set;
}

/// Unit square in R^2 on a regular grid.
inline SampledSet calibration_square(int per_side = 1024) {
  SampledSet set(1);
  set.reserve(static_cast<std::size_t>(per_side) * per_side);
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j)
      set.add(Vec((Vec(2) << (i + 0.5) / per_side, (j + 0.5) / per_side).finished()));
  set.fill_distance = std::sqrt(0.5) / per_side;
  return set;
}

struct ContainmentReport {
  std::string region;
  double max_violation = 0.0;
  std::size_t worst_index = 0;
  double slack = 0.0;
  bool pass = true;
};

namespace detail {

template <class Excess>
ContainmentReport containment_scan(const SampledSet& set, std::string region, double slack, Excess excess) {
  ContainmentReport rep{std::move(region), 0.0, 0, slack, true};
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double v = std::max(0.0, excess(set.point(i)));
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_index = i;
    }
  }
  rep.pass = rep.max_violation <= slack;
  return rep;
}

}  // namespace detail

inline ContainmentReport containment(const SampledSet& set, const BallSpec& ball, double slack) {
  const double r = ball.radius();
  const int dim = set.dim();
  return detail::containment_scan(set, "ball", slack, [=](const double* x) {
    return Eigen::Map<const Vec>(x, dim).norm() - r;
  });
}

inline ContainmentReport containment(const SampledSet& set, const CylinderSpec& cyl, double slack) {
  const double r = cyl.radius();
  const int n = set.n;
  return detail::containment_scan(set, "cylinder", slack, [=](const double* x) { return std::hypot(x[0], x[n]) - r; });
}

inline ContainmentReport containment(const SampledSet& set, const PolydiscSpec& poly, double slack) {
  if (static_cast<int>(poly.radii.size()) != set.n) throw DimensionError("polydisc needs one radius per complex slot");
  const int n = set.n;
  const std::vector<double> radii = poly.radii;
  return detail::containment_scan(set, "polydisc", slack, [=](const double* x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (std::isfinite(radii[j])) worst = std::max(worst, std::hypot(x[j], x[n + j]) - radii[j]);
    return worst;
  });
}

struct ShadowReport {
  double area = 0.0;
  double epsilon = 0.0;
  double cell = 0.0;
  int grid = 0;
};

namespace detail {

/// Squared distance transform along one line (lower envelope of parabolas).
inline void edt_line(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                     std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  auto meet = [&](int q, int r) { return ((f[q] + double(q) * q) - (f[r] + double(r) * r)) / (2.0 * q - 2.0 * r); };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = meet(q, v[k]);
    while (k > 0 && s <= z[k]) s = meet(q, v[--k]);
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace detail

/// Area of the eps-neighbourhood of the projection to the (q_1, p_1) plane,
/// measured on a grid with `grid` cells along the longer side.
inline ShadowReport shadow_area(const SampledSet& set, double epsilon, int grid = 1024) {
  if (set.empty()) return {0.0, epsilon, 0.0, grid};
  if (!(epsilon > set.fill_distance)) throw std::invalid_argument("epsilon must exceed the fill distance");
  const int n = set.n;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double* p = set.point(i);
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[n]);
    y1 = std::max(y1, p[n]);
  }
  x0 -= epsilon;
  y0 -= epsilon;
  x1 += epsilon;
  y1 += epsilon;
  const double h = std::max(x1 - x0, y1 - y0) / grid;
  if (epsilon < 4.0 * h) throw std::invalid_argument("epsilon is below the grid resolution");
  const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h)));
  const int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / h)));

  // Representatives on a 16x finer lattice keep the exact test cheap.
  std::vector<std::uint64_t> fine_keys;
  std::vector<double> reps;
  {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed(set.size());
    const double hf = h / 16.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double* p = set.point(i);
      const auto ix = static_cast<std::uint64_t>((p[0] - x0) / hf);
      const auto iy = static_cast<std::uint64_t>((p[n] - y0) / hf);
      keyed[i] = {(ix << 32) | iy, i};
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < keyed.size(); ++k) {
      if (k > 0 && keyed[k].first == keyed[k - 1].first) continue;
      const double* p = set.point(keyed[k].second);
      reps.push_back(p[0]);
      reps.push_back(p[n]);
    }
  }
  const std::size_t nrep = reps.size() / 2;

  constexpr double far = 1e20;
  std::vector<double> dist(static_cast<std::size_t>(nx) * ny, far);
  for (std::size_t r = 0; r < nrep; ++r) {
    const int ix = std::clamp(static_cast<int>((reps[2 * r] - x0) / h), 0, nx - 1);
    const int iy = std::clamp(static_cast<int>((reps[2 * r + 1] - y0) / h), 0, ny - 1);
    dist[static_cast<std::size_t>(ix) * ny + iy] = 0.0;
  }
  {
    const int m = std::max(nx, ny);
    std::vector<double> f(m), d(m), z(m + 1);
    std::vector<int> v(m);
    for (int ix = 0; ix < nx; ++ix) {
      f.assign(dist.begin() + static_cast<std::ptrdiff_t>(ix) * ny, dist.begin() + static_cast<std::ptrdiff_t>(ix + 1) * ny);
      d.resize(ny);
      detail::edt_line(f, d, v, z);
      std::copy(d.begin(), d.end(), dist.begin() + static_cast<std::ptrdiff_t>(ix) * ny);
    }
    f.resize(nx);
    d.resize(nx);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) f[ix] = dist[static_cast<std::size_t>(ix) * ny + iy];
      detail::edt_line(f, d, v, z);
      for (int ix = 0; ix < nx; ++ix) dist[static_cast<std::size_t>(ix) * ny + iy] = d[ix];
    }
  }

  const KdTree tree(reps.data(), nrep, 2);
  const double half_diag = h / std::sqrt(2.0);
  std::size_t inside = 0;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      const double dc = std::sqrt(dist[static_cast<std::size_t>(ix) * ny + iy]) * h;
      if (dc + half_diag <= epsilon) {
        ++inside;
      } else if (dc - half_diag <= epsilon) {
        const double c[2] = {x0 + (ix + 0.5) * h, y0 + (iy + 0.5) * h};
        if (tree.nearest(c).distance <= epsilon) ++inside;
      }
    }
  return {static_cast<double>(inside) * h * h, epsilon, h, grid};
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian matrix.
template <class Rng>
CMat haar_unitary(int n, Rng& rng) {
  std::normal_distribution<double> gauss;
  CMat g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < n; ++c) {
    const cplx d = rr(c, c);
    if (std::abs(d) > 0) q.col(c) *= d / std::abs(d);
  }
  return q;
}

inline Vec apply_unitary(const CMat& u, const Vec& x) {
  return PhasePoint::from_complex(u * PhasePoint(static_cast<int>(u.rows()), x).complex()).coords();
}

struct RotationSearch {
  bool found = false;
  CMat rotation;
  /// Distance from (1, 0, ..., 0) to the rotated samples.
  double distance = 0.0;
  /// Bound on the first coordinate q_1 of the rotated set, fill distance included.
  double c = 1.0;
  int evaluated = 0;
};

struct RotationSearchOptions {
  int candidates = 1024;
  int refine_steps = 400;
  std::uint64_t seed = 11;
  /// Keep the identity when it already clears the margin.
  bool accept_identity = true;
};

/// Unitary keeping the sampled set at least `margin` away from e_1: the
/// identity when it already does, else the farthest one the search finds.
inline RotationSearch find_avoiding_rotation(const SampledSet& set, double margin, RotationSearchOptions opt = {}) {
  const int n = set.n;
  const KdTree tree(set.data.data(), set.size(), set.dim());
  const Vec pole = Vec::Unit(2 * n, 0);
  RotationSearch out;
  // |U x - e_1| = |x - U^* e_1|
  auto score = [&](const CMat& u) {
    ++out.evaluated;
    const Vec target = apply_unitary(u.adjoint(), pole);
    return tree.nearest(target.data()).distance;
  };

  CMat best = CMat::Identity(n, n);
  double best_d = score(best);
  if (!(opt.accept_identity && best_d >= margin)) {
    std::mt19937_64 rng(opt.seed);
    for (int k = 0; k < opt.candidates; ++k) {
      CMat u = haar_unitary(n, rng);
      const double d = score(u);
      if (d > best_d) {
        best_d = d;
        best = u;
      }
    }
    std::normal_distribution<double> gauss;
    double step = 0.2;
    for (int it = 0; it < opt.refine_steps; ++it) {
      CMat k(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) k(r, c) = cplx(gauss(rng), gauss(rng));
      k = 0.5 * step * (k - k.adjoint().eval());
      const CMat eye = CMat::Identity(n, n);
      const CMat cayley = (eye - 0.5 * k).partialPivLu().solve(eye + 0.5 * k);
      const CMat u = cayley * best;
      const double d = score(u);
      if (d > best_d) {
        best_d = d;
        best = u;
      } else if (it % 20 == 19) {
        step *= 0.7;
      }
    }
  }
  out.rotation = best;
  out.distance = best_d;
  out.found = best_d >= margin;
  double qmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) qmax = std::max(qmax, apply_unitary(best, set.at(i))[0]);
  out.c = std::min(1.0, qmax + set.fill_distance);
  return out;
}

}  // namespace symcap
