#pragma once

#include "symcap/moser.hpp"
#include "symcap/sampled_set.hpp"
#include "symcap/set_analysis.hpp"

#include <random>
#include <string>

namespace symcap {

struct Ellipse2 {
  Vec2 center = Vec2::Zero();
  double a = 0.0, b = 0.0, angle = 0.0;
  double area() const { return pi * a * b; }
};

/// Ellipse containing `pts` with axes along the principal directions, the
/// aspect ratio chosen to minimize area.
inline Ellipse2 principal_ellipse(const std::vector<Vec2>& pts) {
  if (pts.empty()) throw std::invalid_argument("no points to enclose");
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Vec2 major = eig.eigenvectors().col(1);
  const double angle = std::atan2(major.y(), major.x());
  const Vec2 minor(-major.y(), major.x());

  double u0 = unbounded, u1 = -unbounded, v0 = unbounded, v1 = -unbounded;
  for (const Vec2& p : pts) {
    const double u = major.dot(p - mean), v = minor.dot(p - mean);
    u0 = std::min(u0, u);
    u1 = std::max(u1, u);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
  }
  const double uc = 0.5 * (u0 + u1), vc = 0.5 * (v0 + v1);
  Ellipse2 e;
  e.center = mean + uc * major + vc * minor;
  e.angle = angle;
  std::vector<Vec2> local(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) local[i] = {major.dot(pts[i] - e.center), minor.dot(pts[i] - e.center)};
  auto axes = [&](double log_ratio) {
    const double k = std::exp(log_ratio);
    double b2 = 0.0;
    for (const Vec2& p : local) b2 = std::max(b2, p.x() * p.x() / (k * k) + p.y() * p.y());
    return std::pair{k * std::sqrt(b2), std::sqrt(b2)};
  };
  auto cost = [&](double lr) {
    const auto [a, b] = axes(lr);
    return a * b;
  };
  double lo = -12.0, hi = 12.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo), f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 120; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = cost(x2);
    }
  }
  std::tie(e.a, e.b) = axes(0.5 * (lo + hi));
  return e;
}

/// Points whose convex hull contains the eps-disc around each input point.
inline std::vector<Vec2> inflate_points(const std::vector<Vec2>& pts, double eps, int sides = 8) {
  const double r = eps / std::cos(pi / sides);
  std::vector<Vec2> out;
  out.reserve(pts.size() * sides);
  for (const Vec2& p : pts)
    for (int k = 0; k < sides; ++k) out.push_back(p + r * Vec2(std::cos(2 * pi * k / sides), std::sin(2 * pi * k / sides)));
  return out;
}

/// Smallest ellipse symmetric about the q-axis containing the closed
/// segment {|z| <= 1 + eta, q <= c + eta}, found by a grid-and-refine search.
inline Ellipse2 segment_ellipse(double c, double eta = 1e-3) {
  if (!(c > -1.0 && c <= 1.0)) throw std::invalid_argument("segment cut must lie in (-1, 1]");
  const double R = 1.0 + eta, cut = std::min(R, c + eta);
  const double t0 = std::acos(cut / R);
  const int m = 2000;
  std::vector<Vec2> arc;
  arc.reserve(m + 1);
  for (int k = 0; k <= m; ++k) {
    const double t = t0 + (2 * pi - 2 * t0) * k / m;
    arc.emplace_back(R * std::cos(t), R * std::abs(std::sin(t)));
  }
  auto semi_minor = [&](double xc, double A) {
    double b = 0.0;
    for (const Vec2& p : arc) {
      const double u = (p.x() - xc) / A;
      if (u * u >= 1.0) return unbounded;
      b = std::max(b, p.y() / std::sqrt(1.0 - u * u));
    }
    return b;
  };
  double best = unbounded, bx = 0.0, ba = 0.0;
  auto consider = [&](double xc, double A) {
    const double b = semi_minor(xc, A);
    if (A * b < best) {
      best = A * b;
      bx = xc;
      ba = A;
    }
  };
  const int grid = 60;
  for (int i = 0; i <= grid; ++i) {
    const double xc = -R + (cut + R) * i / grid;
    const double amin = std::max(xc + R, cut - xc) * (1.0 + 1e-9);
    for (int j = 0; j < grid; ++j) consider(xc, amin * (1.0 + 2.0 * j / grid));
  }
  double sx = (cut + R) / grid, sa = 2.0 * ba / grid;
  for (int it = 0; it < 60; ++it) {
    const double cx = bx, ca = ba;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        const double xc = cx + di * sx, A = ca + dj * sa;
        if (A > std::max(xc + R, cut - xc)) consider(xc, A);
      }
    if (bx == cx && ba == ca) {
      sx *= 0.5;
      sa *= 0.5;
    }
  }
  Ellipse2 e;
  e.center = {bx, 0.0};
  e.a = ba;
  e.b = semi_minor(bx, ba) * (1.0 + 1e-9);
  return e;
}

struct SqueezeOptions {
  enum class Route { automatic, shadow, rotation };
  Route route = Route::automatic;
  int probes = 1000;
  double defect_tolerance = 1e-5;
  /// Distance from e_1 the rotation search must reach.
  double rotation_margin = 0.05;
  double eta = 1e-3;
  int shadow_grid = 1024;
  MoserOptions moser{};
  std::uint64_t seed = 17;
};

struct SqueezeResult {
  bool success = false;
  std::string route;
  std::string reason;
  double target = 0.0;
  double epsilon = 0.0;
  double shadow_area = unbounded;
  double neighborhood_area = unbounded;
  std::string branch;
  double defect = unbounded;
  bool image_inside = false;
  /// Largest |z_1| over the image samples, against the cylinder radius.
  double image_radius = 0.0;
  double cylinder_radius = 0.0;
  double min_probe_separation = 0.0;
  bool injective = false;
  RotationSearch rotation;
  std::function<Vec(const Vec&)> map;
};

namespace detail {

inline std::vector<Vec2> shadow_points(const SampledSet& set) {
  std::vector<Vec2> pts(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) pts[i] = {set.point(i)[0], set.point(i)[set.n]};
  return pts;
}

/// Star domain about `center` whose radius dominates the points by bins.
inline PlanarDomain star_hull(const Vec2& center, const std::vector<Vec2>& pts, int bins = 256) {
  std::vector<double> raw(bins, 0.0);
  for (const Vec2& p : pts) {
    const Vec2 d = p - center;
    double t = std::atan2(d.y(), d.x());
    if (t < 0) t += 2 * pi;
    const int k = std::min(bins - 1, static_cast<int>(t / (2 * pi) * bins));
    for (int s = -1; s <= 1; ++s) {
      double& r = raw[(k + s + bins) % bins];
      r = std::max(r, d.norm());
    }
  }
  const double floor = 1e-3 * *std::max_element(raw.begin(), raw.end());
  for (double& r : raw) r = std::max(r, floor);
  return PlanarDomain::smooth_star(center, raw);
}

/// Fills in the certificate fields for the composite map on the set.
inline void certify(SqueezeResult& res, const SampledSet& set, const SqueezeOptions& opt) {
  const CylinderSpec cyl{res.target};
  res.cylinder_radius = cyl.radius();
  double worst = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec y = res.map(set.at(i));
    worst = std::max(worst, std::hypot(y[0], y[set.n]));
  }
  res.image_radius = worst;
  res.image_inside = worst < res.cylinder_radius;

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  std::vector<Vec> probes;
  std::vector<std::size_t> chosen;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(opt.probes), set.size());
  if (count == set.size()) {
    for (std::size_t i = 0; i < count; ++i) chosen.push_back(i);
  } else {
    for (std::size_t k = 0; k < count; ++k) chosen.push_back(pick(rng));
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  }
  for (std::size_t i : chosen) probes.push_back(set.at(i));
  res.defect = symplecticity_defect(res.map, probes);

  std::vector<Vec> images(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) images[i] = res.map(probes[i]);
  double sep = unbounded;
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = i + 1; j < probes.size(); ++j)
      if ((probes[i] - probes[j]).norm() > 0) sep = std::min(sep, (images[i] - images[j]).norm());
  res.min_probe_separation = sep;
  res.injective = sep > 0.0;

  res.success = res.image_inside && res.injective && res.defect <= opt.defect_tolerance;
  if (!res.success) {
    if (!res.image_inside) res.reason = "image leaves the target cylinder";
    else if (!res.injective) res.reason = "probe images collide";
    else res.reason = "symplecticity defect above tolerance";
  }
}

/// phi x id on R^{2n}, phi acting on (q_1, p_1).
inline std::function<Vec(const Vec&)> planar_product(const GridMap2D& g, int n) {
  const auto phi = g.map;
  return [phi, n](const Vec& x) {
    Vec y = x;
    const Vec2 z = phi(Vec2(x[0], x[n]));
    y[0] = z.x();
    y[n] = z.y();
    return y;
  };
}

inline GridMap2D embed_neighbourhood(const PlanarDomain& U, double a, const SqueezeOptions& opt) {
  VolumeEmbedOptions vopt;
  vopt.moser = opt.moser;
  vopt.strict = false;
  return volume_embed(U, a, vopt);
}

inline SqueezeResult shadow_route(const SampledSet& set, double a, const SqueezeOptions& opt) {
  SqueezeResult res;
  res.route = "shadow";
  res.target = a;
  const double fill = set.fill_distance > 0 ? set.fill_distance : nearest_neighbour_spacing(set);
  SampledSet probe_set = set;
  probe_set.fill_distance = fill;

  double extent = 0.0;
  {
    double x0 = unbounded, x1 = -unbounded, y0 = unbounded, y1 = -unbounded;
    for (std::size_t i = 0; i < set.size(); ++i) {
      x0 = std::min(x0, set.point(i)[0]);
      x1 = std::max(x1, set.point(i)[0]);
      y0 = std::min(y0, set.point(i)[set.n]);
      y1 = std::max(y1, set.point(i)[set.n]);
    }
    extent = std::max(x1 - x0, y1 - y0);
  }
  double chosen = 0.0;
  for (double factor : {1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
    const double eps = std::max(factor * fill, 1e-6 * std::max(extent, 1.0));
    const int grid = std::clamp(static_cast<int>(std::ceil(4.0 * (extent + 2 * eps) / eps)) + 1, opt.shadow_grid, 8192);
    double area;
    try {
      area = shadow_area(probe_set, eps, grid).area;
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (area < res.shadow_area) {
      res.shadow_area = area;
      res.epsilon = eps;
    }
    if (area < a) {
      chosen = eps;
      break;
    }
  }
  if (chosen == 0.0) {
    res.reason = "no admissible epsilon: shadow area is not below the target";
    return res;
  }

  const std::vector<Vec2> pts = inflate_points(shadow_points(set), chosen);
  const Ellipse2 e = principal_ellipse(pts);
  const double grow = 1.0 + 1e-6;
  if (e.area() * grow * grow < a) {
    const PlanarDomain U = PlanarDomain::ellipse(e.center, e.a * grow, e.b * grow, e.angle);
    res.neighborhood_area = U.area();
    const GridMap2D g = embed_neighbourhood(U, a, opt);
    res.branch = g.branch;
    res.map = planar_product(g, set.n);
  } else {
    const PlanarDomain U = star_hull(e.center, pts);
    res.neighborhood_area = U.area();
    if (!(U.area() < a)) {
      res.reason = "neighbourhood of the shadow is not smaller than the target";
      return res;
    }
    const GridMap2D g = embed_neighbourhood(U, a, opt);
    res.branch = g.branch;
    res.map = planar_product(g, set.n);
  }
  certify(res, set, opt);
  return res;
}

inline SqueezeResult rotation_route(const SampledSet& set, double a, const SqueezeOptions& opt) {
  SqueezeResult res;
  res.route = "rotation";
  res.target = a;
  if (a < pi) {
    res.reason = "rotation route targets the cylinder of area pi or larger";
    return res;
  }
  if (!containment(set, BallSpec{pi}, 1e-9).pass) {
    res.reason = "set is not inside the closed unit ball";
    return res;
  }
  RotationSearchOptions search;
  search.seed = opt.seed;
  search.accept_identity = false;
  res.rotation = find_avoiding_rotation(set, opt.rotation_margin, search);
  if (!res.rotation.found) {
    res.reason = "no rotation keeps the set away from e_1";
    return res;
  }
  const double c = res.rotation.c;
  const CMat u = res.rotation.rotation;
  const int n = set.n;
  const Ellipse2 e = segment_ellipse(c, opt.eta);
  GridMap2D g;
  if (e.area() < a) {
    const PlanarDomain U = PlanarDomain::ellipse(e.center, e.a, e.b, 0.0);
    res.neighborhood_area = U.area();
    g = embed_neighbourhood(U, a, opt);
  } else {
    const double R = 1.0 + opt.eta, cut = std::min(R, c + opt.eta);
    std::vector<Vec2> pts;
    for (int k = 0; k < 4096; ++k) {
      const double t = 2 * pi * k / 4096;
      Vec2 p(R * std::cos(t), R * std::sin(t));
      if (p.x() > cut) p.x() = cut;
      pts.push_back(p);
    }
    const PlanarDomain U = star_hull(Vec2(0.5 * (cut - R), 0.0), pts);
    res.neighborhood_area = U.area();
    if (!(U.area() < a)) {
      res.reason = "segment neighbourhood is not smaller than the target";
      return res;
    }
    g = embed_neighbourhood(U, a, opt);
  }
  res.branch = g.branch;
  const auto inner = planar_product(g, n);
  res.map = [inner, u](const Vec& x) { return inner(apply_unitary(u, x)); };
  certify(res, set, opt);
  return res;
}

}  // namespace detail

/// Symplectic embedding of a neighbourhood of the set into Z^{2n}(a), by the
/// small-shadow route or, for subsets of the closed unit ball, the
/// rotation-and-segment route. Reports failure rather than throwing when no
/// route applies.
inline SqueezeResult squeeze_pipeline(const SampledSet& set, double a, SqueezeOptions opt = {}) {
  if (set.empty()) throw std::invalid_argument("squeeze_pipeline needs a nonempty set");
  if (!(a > 0)) throw std::invalid_argument("target area must be positive");
  using Route = SqueezeOptions::Route;
  if (opt.route == Route::shadow) return detail::shadow_route(set, a, opt);
  if (opt.route == Route::rotation) return detail::rotation_route(set, a, opt);
  SqueezeResult first = detail::shadow_route(set, a, opt);
  if (first.success || a < pi) return first;
  SqueezeResult second = detail::rotation_route(set, a, opt);
  if (second.success) return second;
  second.reason = first.reason + "; " + second.reason;
  second.shadow_area = first.shadow_area;
  second.epsilon = first.epsilon;
  return second;
}

}  // namespace symcap
