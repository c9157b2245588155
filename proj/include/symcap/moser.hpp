#pragma once

#include "symcap/core.hpp"
#include "symcap/kdtree.hpp"
#include "symcap/parallel.hpp"
#include "symcap/smooth_step.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdint>
#include <array>
#include <complex>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace symcap {

using Vec2 = Eigen::Vector2d;

struct Box2 {
  double x0, x1, y0, y1;
};

/// Open star-shaped planar region described by its boundary radius along rays
/// from a center, plus a smooth inner radius no larger than the boundary one.
class PlanarDomain {
 public:
  enum class Kind { disc, ellipse, rectangle, star };

  static PlanarDomain disc(Vec2 center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("disc radius must be positive");
    PlanarDomain d(Kind::disc, center);
    d.a_ = d.b_ = radius;
    d.radius_ = [radius](double) { return radius; };
    d.inner_ = d.radius_;
    d.finish(pi * radius * radius);
    return d;
  }

  /// Ellipse with semi-axes a, b, the first along direction `angle`.
  static PlanarDomain ellipse(Vec2 center, double a, double b, double angle = 0.0) {
    if (!(a > 0 && b > 0)) throw std::invalid_argument("ellipse axes must be positive");
    PlanarDomain d(Kind::ellipse, center);
    d.a_ = a;
    d.b_ = b;
    d.angle_ = angle;
    d.radius_ = [a, b, angle](double t) {
      const double c = std::cos(t - angle) / a, s = std::sin(t - angle) / b;
      return 1.0 / std::sqrt(c * c + s * s);
    };
    d.inner_ = d.radius_;
    d.finish(pi * a * b);
    return d;
  }

  /// Axis-aligned rectangle with half-widths hx, hy; the inner radius is the
  /// inscribed superellipse of exponent `p`.
  static PlanarDomain rectangle(Vec2 center, double hx, double hy, double p = 16.0) {
    if (!(hx > 0 && hy > 0)) throw std::invalid_argument("rectangle half-widths must be positive");
    PlanarDomain d(Kind::rectangle, center);
    d.a_ = hx;
    d.b_ = hy;
    d.radius_ = [hx, hy](double t) {
      const double c = std::abs(std::cos(t)), s = std::abs(std::sin(t));
      return std::min(c > 0 ? hx / c : unbounded, s > 0 ? hy / s : unbounded);
    };
    d.inner_ = [hx, hy, p](double t) {
      const double c = std::abs(std::cos(t)) / hx, s = std::abs(std::sin(t)) / hy;
      const double m = std::max(c, s);
      return 1.0 / (m * std::pow(std::pow(c / m, p) + std::pow(s / m, p), 1.0 / p));
    };
    d.finish(4.0 * hx * hy);
    return d;
  }

  /// Star domain with a smooth boundary radius function.
  static PlanarDomain star(Vec2 center, std::function<double(double)> radius) {
    PlanarDomain d(Kind::star, center);
    d.radius_ = std::move(radius);
    d.inner_ = d.radius_;
    const int m = 4096;
    double area = 0.0;
    for (int k = 0; k < m; ++k) {
      const double r = d.radius_(2 * pi * k / m);
      if (!(r > 0)) throw std::invalid_argument("star radius must be positive");
      area += 0.5 * r * r * (2 * pi / m);
    }
    d.finish(area);
    return d;
  }

  /// Smooth star domain whose radius is a truncated Fourier series lifted to
  /// dominate `raw` sampled at `bins` angles.
  static PlanarDomain smooth_star(Vec2 center, const std::vector<double>& raw, int modes = 24) {
    const int m = static_cast<int>(raw.size());
    if (m < 2 * modes + 1) throw std::invalid_argument("too few radius samples");
    std::vector<double> ca(modes + 1, 0.0), sa(modes + 1, 0.0);
    for (int k = 0; k <= modes; ++k)
      for (int i = 0; i < m; ++i) {
        const double t = 2 * pi * i / m;
        ca[k] += raw[i] * std::cos(k * t) * 2.0 / m;
        sa[k] += raw[i] * std::sin(k * t) * 2.0 / m;
      }
    ca[0] *= 0.5;
    auto series = [ca, sa, modes](double t) {
      double s = ca[0];
      for (int k = 1; k <= modes; ++k) s += ca[k] * std::cos(k * t) + sa[k] * std::sin(k * t);
      return s;
    };
    double lift = 0.0;
    for (int i = 0; i < m; ++i) lift = std::max(lift, raw[i] - series(2 * pi * i / m));
    const double bin = 2 * pi / m;
    double slope = 0.0;
    for (int i = 0; i < m; ++i) slope = std::max(slope, std::abs(raw[(i + 1) % m] - raw[i]) / bin);
    lift += slope * bin;
    return star(center, [series, lift](double t) { return series(t) + lift; });
  }

  Kind kind() const { return kind_; }
  const Vec2& center() const { return center_; }
  double area() const { return area_; }
  double radius(double theta) const { return radius_(theta); }
  double inner_radius(double theta) const { return inner_(theta); }
  double min_radius() const { return min_r_; }
  double max_radius() const { return max_r_; }
  /// max over rays of radius / inner radius.
  double max_ratio() const { return max_ratio_; }
  const Box2& bounds() const { return box_; }
  double semi_a() const { return a_; }
  double semi_b() const { return b_; }
  double angle() const { return angle_; }

  bool contains(const Vec2& x) const {
    const Vec2 d = x - center_;
    return d.norm() < radius_(std::atan2(d.y(), d.x()));
  }

 private:
  PlanarDomain(Kind k, Vec2 c) : kind_(k), center_(c) {}

  void finish(double area) {
    area_ = area;
    const int m = 8192;
    min_r_ = unbounded;
    max_r_ = 0.0;
    max_ratio_ = 1.0;
    box_ = {center_.x(), center_.x(), center_.y(), center_.y()};
    for (int k = 0; k < m; ++k) {
      const double t = 2 * pi * k / m;
      const double r = radius_(t);
      min_r_ = std::min(min_r_, r);
      max_r_ = std::max(max_r_, r);
      max_ratio_ = std::max(max_ratio_, r / inner_(t));
      const Vec2 p = center_ + r * Vec2(std::cos(t), std::sin(t));
      box_.x0 = std::min(box_.x0, p.x());
      box_.x1 = std::max(box_.x1, p.x());
      box_.y0 = std::min(box_.y0, p.y());
      box_.y1 = std::max(box_.y1, p.y());
    }
    if (kind_ == Kind::rectangle) {
      box_ = {center_.x() - a_, center_.x() + a_, center_.y() - b_, center_.y() + b_};
      min_r_ = std::min(a_, b_);
      max_r_ = std::hypot(a_, b_);
    }
  }

  Kind kind_;
  Vec2 center_;
  std::function<double(double)> radius_;
  std::function<double(double)> inner_;
  double area_ = 0.0;
  double min_r_ = 0.0, max_r_ = 0.0, max_ratio_ = 1.0;
  double a_ = 0.0, b_ = 0.0, angle_ = 0.0;
  Box2 box_{};
};

/// Map sampled on a node grid over a box, with its Jacobian determinant field.
struct GridMap2D {
  double x0 = 0, y0 = 0, hx = 0, hy = 0;
  int nx = 0, ny = 0;
  std::vector<Vec2> value;
  std::vector<double> jacobian;
  std::vector<std::uint8_t> inside;
  std::function<Vec2(const Vec2&)> map;
  std::function<double(const Vec2&)> det;
  std::string branch;
  double min_jacobian = 0.0, max_jacobian = 0.0;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * (ny + 1) + j; }
  Vec2 node(int i, int j) const { return {x0 + i * hx, y0 + j * hy}; }
  std::size_t nodes() const { return static_cast<std::size_t>(nx + 1) * (ny + 1); }

  double max_jacobian_deviation() const {
    return std::max(std::abs(min_jacobian - 1.0), std::abs(max_jacobian - 1.0));
  }
  double max_image_radius(const Vec2& c = Vec2::Zero()) const {
    double r = 0.0;
    for (std::size_t k = 0; k < value.size(); ++k)
      if (inside[k]) r = std::max(r, (value[k] - c).norm());
    return r;
  }

  /// Preimage of y by Newton's method started from the nearest node image.
  Vec2 inverse(const Vec2& y, int iterations = 30) const {
    if (!tree_) {
      flat_.resize(2 * value.size());
      for (std::size_t k = 0; k < value.size(); ++k) {
        flat_[2 * k] = value[k].x();
        flat_[2 * k + 1] = value[k].y();
      }
      tree_ = std::make_shared<KdTree>(flat_.data(), value.size(), 2);
    }
    const std::size_t k = tree_->nearest(y.data()).index;
    Vec2 x = node(static_cast<int>(k / (ny + 1)), static_cast<int>(k % (ny + 1)));
    const double h = 1e-3 * std::max(hx, hy);
    for (int it = 0; it < iterations; ++it) {
      const Vec2 r = map(x) - y;
      if (r.norm() < 1e-13) break;
      Eigen::Matrix2d d;
      d.col(0) = (map(x + Vec2(h, 0)) - map(x - Vec2(h, 0))) / (2 * h);
      d.col(1) = (map(x + Vec2(0, h)) - map(x - Vec2(0, h))) / (2 * h);
      x -= d.inverse() * r;
    }
    return x;
  }

 private:
  mutable std::vector<double> flat_;
  mutable std::shared_ptr<KdTree> tree_;
};

namespace detail {

/// In-place cubic B-spline prefilter along a strided line, mirror boundary.
inline void bspline_prefilter(double* c, int n, std::ptrdiff_t stride) {
  if (n < 2) return;
  const double z = std::sqrt(3.0) - 2.0;
  auto at = [&](int k) -> double& { return c[k * stride]; };
  for (int k = 0; k < n; ++k) at(k) *= 6.0;
  const int horizon = std::min(n, 32);
  double zn = z, sum = at(0);
  for (int k = 1; k < horizon; ++k) {
    sum += zn * at(k);
    zn *= z;
  }
  at(0) = sum;
  for (int k = 1; k < n; ++k) at(k) += z * at(k - 1);
  at(n - 1) = (z / (z * z - 1.0)) * (at(n - 1) + z * at(n - 2));
  for (int k = n - 2; k >= 0; --k) at(k) = z * (at(k + 1) - at(k));
}

/// Cubic B-spline field on an (mx x my) coefficient lattice.
struct SplineField {
  int mx = 0, my = 0;
  std::vector<double> coef;

  void build(std::vector<double> values, int sx, int sy) {
    mx = sx;
    my = sy;
    coef = std::move(values);
    for (int i = 0; i < mx; ++i) bspline_prefilter(coef.data() + static_cast<std::size_t>(i) * my, my, 1);
    for (int j = 0; j < my; ++j) bspline_prefilter(coef.data() + j, mx, my);
  }

  double operator()(double u, double v) const {
    const int iu = static_cast<int>(std::floor(u)), iv = static_cast<int>(std::floor(v));
    const double tu = u - iu, tv = v - iv;
    double wu[4], wv[4];
    auto weights = [](double t, double* w) {
      const double t2 = t * t, t3 = t2 * t;
      w[0] = (1 - t) * (1 - t) * (1 - t) / 6.0;
      w[1] = (3 * t3 - 6 * t2 + 4) / 6.0;
      w[2] = (-3 * t3 + 3 * t2 + 3 * t + 1) / 6.0;
      w[3] = t3 / 6.0;
    };
    weights(tu, wu);
    weights(tv, wv);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
      const int i = std::clamp(iu - 1 + a, 0, mx - 1);
      double row = 0.0;
      for (int b = 0; b < 4; ++b) {
        const int j = std::clamp(iv - 1 + b, 0, my - 1);
        row += wv[b] * coef[static_cast<std::size_t>(i) * my + j];
      }
      s += wu[a] * row;
    }
    return s;
  }
};

/// Fourth-order derivative of a node line, one-sided near the ends.
inline double line_derivative(const std::vector<double>& f, int i, double h) {
  const int n = static_cast<int>(f.size()) - 1;
  if (n < 4) {
    if (i == 0) return (f[1] - f[0]) / h;
    if (i == n) return (f[n] - f[n - 1]) / h;
    return (f[i + 1] - f[i - 1]) / (2 * h);
  }
  if (i >= 2 && i <= n - 2) return (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
  if (i == 0) return (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  if (i == 1) return (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  if (i == n) return (25 * f[n] - 48 * f[n - 1] + 36 * f[n - 2] - 16 * f[n - 3] + 3 * f[n - 4]) / (12 * h);
  return (3 * f[n] + 10 * f[n - 1] - 18 * f[n - 2] + 6 * f[n - 3] - f[n - 4]) / (12 * h);
}

}  // namespace detail

/// Fills the Jacobian field from node values (rectangular grids) and the
/// min/max over inside nodes.
inline void grid_jacobian(GridMap2D& g) {
  g.jacobian.assign(g.nodes(), 1.0);
  std::vector<double> lx(g.nx + 1), ly(g.nx + 1), mxv(g.ny + 1), myv(g.ny + 1);
  std::vector<double> dxx(g.nodes()), dxy(g.nodes()), dyx(g.nodes()), dyy(g.nodes());
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      lx[i] = g.value[g.index(i, j)].x();
      ly[i] = g.value[g.index(i, j)].y();
    }
    for (int i = 0; i <= g.nx; ++i) {
      dxx[g.index(i, j)] = detail::line_derivative(lx, i, g.hx);
      dyx[g.index(i, j)] = detail::line_derivative(ly, i, g.hx);
    }
  }
  for (int i = 0; i <= g.nx; ++i) {
    for (int j = 0; j <= g.ny; ++j) {
      mxv[j] = g.value[g.index(i, j)].x();
      myv[j] = g.value[g.index(i, j)].y();
    }
    for (int j = 0; j <= g.ny; ++j) {
      dxy[g.index(i, j)] = detail::line_derivative(mxv, j, g.hy);
      dyy[g.index(i, j)] = detail::line_derivative(myv, j, g.hy);
    }
  }
  g.min_jacobian = unbounded;
  g.max_jacobian = -unbounded;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    g.jacobian[k] = dxx[k] * dyy[k] - dxy[k] * dyx[k];
    if (!g.inside[k]) continue;
    g.min_jacobian = std::min(g.min_jacobian, g.jacobian[k]);
    g.max_jacobian = std::max(g.max_jacobian, g.jacobian[k]);
  }
}

/// Jacobian by centered differences of the evaluable map (masked grids).
inline void probe_jacobian(GridMap2D& g) {
  g.jacobian.assign(g.nodes(), 1.0);
  g.min_jacobian = unbounded;
  g.max_jacobian = -unbounded;
  const double h = 0.5 * std::min(g.hx, g.hy);
  for (int i = 0; i <= g.nx; ++i)
    for (int j = 0; j <= g.ny; ++j) {
      const std::size_t k = g.index(i, j);
      if (!g.inside[k]) continue;
      const Vec2 x = g.node(i, j);
      const Vec2 dx = (g.map(x + Vec2(h, 0)) - g.map(x - Vec2(h, 0))) / (2 * h);
      const Vec2 dy = (g.map(x + Vec2(0, h)) - g.map(x - Vec2(0, h))) / (2 * h);
      g.jacobian[k] = dx.x() * dy.y() - dx.y() * dy.x();
      g.min_jacobian = std::min(g.min_jacobian, g.jacobian[k]);
      g.max_jacobian = std::max(g.max_jacobian, g.jacobian[k]);
    }
}

struct MoserOptions {
  int grid = 512;
  int steps = 64;
  double tol = 1e-4;
};

/// Samples `map` on the node grid of U's bounding box.
inline GridMap2D sample_grid(const PlanarDomain& U, std::function<Vec2(const Vec2&)> map,
                             std::function<double(const Vec2&)> det, int grid, bool masked) {
  GridMap2D g;
  const Box2& b = U.bounds();
  g.x0 = b.x0;
  g.y0 = b.y0;
  g.nx = g.ny = grid;
  g.hx = (b.x1 - b.x0) / grid;
  g.hy = (b.y1 - b.y0) / grid;
  g.map = std::move(map);
  g.det = std::move(det);
  g.value.resize(g.nodes());
  g.inside.assign(g.nodes(), 1);
  if (masked)
    for (int i = 0; i <= g.nx; ++i)
      for (int j = 0; j <= g.ny; ++j) g.inside[g.index(i, j)] = U.contains(g.node(i, j)) ? 1 : 0;
  parallel_for(static_cast<std::size_t>(g.nx + 1), [&](std::size_t i) {
    for (int j = 0; j <= g.ny; ++j) g.value[g.index(static_cast<int>(i), j)] = g.map(g.node(static_cast<int>(i), j));
  });
  return g;
}

/// Smooth radial rescaling phi(c + s u) = s K(s, u) u: K blends from a
/// constant near the center to R / inner_radius, so the boundary lands just
/// inside the ball of radius r while the ball of radius R stays covered.
class RadialEmbedding {
 public:
  RadialEmbedding(const PlanarDomain& U, double r, double r0) : U_(U) {
    if (!(r > r0 && r0 > 0)) throw std::invalid_argument("radial_embed needs r > r0 > 0");
    R_ = 0.999 * r / U.max_ratio();
    if (R_ < r0) throw std::invalid_argument("r0 is too large for the radial construction");
    s_b_ = 0.98 * U.min_radius();
    k0_ = 0.8 * R_ / U.min_radius();
  }

  double inner_target() const { return R_; }

  Vec2 operator()(const Vec2& x) const {
    const Vec2 d = x - U_.center();
    const double s = d.norm();
    if (s == 0.0) return Vec2::Zero();
    return d * gain(s, std::atan2(d.y(), d.x()));
  }

  double det(const Vec2& x) const {
    const Vec2 d = x - U_.center();
    const double s = d.norm();
    if (s == 0.0) return k0_ * k0_;
    const double th = std::atan2(d.y(), d.x());
    const double outer = R_ / U_.inner_radius(th);
    const double k = gain(s, th);
    return k * (k + s * transition_derivative(s / s_b_) / s_b_ * (outer - k0_));
  }

 private:
  double gain(double s, double th) const {
    const double b = transition(s / s_b_);
    return (1.0 - b) * k0_ + b * R_ / U_.inner_radius(th);
  }

  PlanarDomain U_;
  double R_, s_b_, k0_;
};

inline GridMap2D radial_embed(const PlanarDomain& U, double r, double r0, int grid = 256) {
  if (U.kind() == PlanarDomain::Kind::disc || U.kind() == PlanarDomain::Kind::ellipse) {
    if (U.max_radius() <= r && U.min_radius() >= r0 && U.center().norm() == 0.0) {
      GridMap2D g = sample_grid(U, [](const Vec2& x) { return x; }, [](const Vec2&) { return 1.0; }, grid, true);
      g.branch = "identity";
      probe_jacobian(g);
      return g;
    }
  }
  if (U.kind() == PlanarDomain::Kind::disc) {
    const double k = 0.5 * (r + r0) / U.min_radius();
    const Vec2 c = U.center();
    GridMap2D g = sample_grid(
        U, [c, k](const Vec2& x) { return Vec2(k * (x - c)); }, [k](const Vec2&) { return k * k; }, grid, true);
    g.branch = "homothety";
    probe_jacobian(g);
    return g;
  }
  auto phi = std::make_shared<RadialEmbedding>(U, r, r0);
  GridMap2D g = sample_grid(
      U, [phi](const Vec2& x) { return (*phi)(x); }, [phi](const Vec2& x) { return phi->det(x); }, grid,
      U.kind() != PlanarDomain::Kind::rectangle);
  g.branch = "radial";
  if (U.kind() == PlanarDomain::Kind::rectangle)
    grid_jacobian(g);
  else
    probe_jacobian(g);
  return g;
}

struct MoserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Solves lap(theta) = f with mirror (Neumann) boundary on a full node grid by DCT-I.
inline std::vector<double> neumann_poisson_dct(std::vector<double> f, int nx, int ny, double hx, double hy) {
  const int mx = nx + 1, my = ny + 1;
  double mean = 0.0, wsum = 0.0;
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) {
      const double w = (i == 0 || i == nx ? 0.5 : 1.0) * (j == 0 || j == ny ? 0.5 : 1.0);
      mean += w * f[static_cast<std::size_t>(i) * my + j];
      wsum += w;
    }
  mean /= wsum;
  for (double& v : f) v -= mean;
  std::vector<double> spec(f.size());
  fftw_plan fwd = fftw_plan_r2r_2d(mx, my, f.data(), spec.data(), FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) {
      const double lx = (2 * std::cos(pi * i / nx) - 2) / (hx * hx);
      const double ly = (2 * std::cos(pi * j / ny) - 2) / (hy * hy);
      double& s = spec[static_cast<std::size_t>(i) * my + j];
      s = (i == 0 && j == 0) ? 0.0 : s / (lx + ly);
    }
  std::vector<double> theta(f.size());
  fftw_plan inv = fftw_plan_r2r_2d(mx, my, spec.data(), theta.data(), FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
  fftw_execute(inv);
  fftw_destroy_plan(inv);
  const double norm = 4.0 * nx * ny;
  for (double& v : theta) v /= norm;
  return theta;
}

/// Explicit solution of div v = -f on a star domain with v = 0 on the
/// boundary: a radial part balancing the mass on each ray, plus a tangential
/// part supported in an inner annulus that moves the ray excess between rays.
class StarDivergence {
 public:
  StarDivergence(const PlanarDomain& U, const std::function<double(const Vec2&)>& f, int rays = 512,
                 int radial = 384)
      : c_(U.center()), rays_(rays) {
    if (rays % 2 != 0) throw std::invalid_argument("ray count must be even");
    const double m = U.min_radius();
    edge_ = {0.05 * m, 0.35 * m, 0.6 * m, 0.95 * m};
    norm_ = moment(edge_[3]);
    hs_ = 1.5 * U.max_radius() / radial;
    ht_ = 2 * pi / rays;
    auto at = [&](double s, double t) { return f(c_ + s * Vec2(std::cos(t), std::sin(t))); };

    // Ray masses by Gauss-Legendre on 8 panels.
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
                                 0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                                 0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
    std::vector<double> g(rays), half_sq(rays);
    for (int j = 0; j < rays; ++j) {
      const double t = j * ht_, R = U.radius(t), panel = R / 8;
      double sum = 0.0;
      for (int p = 0; p < 8; ++p) {
        const double mid = (p + 0.5) * panel;
        for (int k = 0; k < 8; ++k)
          for (double sign : {-1.0, 1.0}) {
            const double s = mid + sign * gx[k] * 0.5 * panel;
            sum += gw[k] * 0.5 * panel * at(s, t) * s;
          }
      }
      g[j] = sum;
      half_sq[j] = 0.5 * R * R;
    }
    // Remove the mean density so that the ray masses balance exactly.
    excess_ = std::accumulate(g.begin(), g.end(), 0.0) / std::accumulate(half_sq.begin(), half_sq.end(), 0.0);
    for (int j = 0; j < rays; ++j) g[j] -= excess_ * half_sq[j];

    // Antiderivative of g - mean from its discrete Fourier series.
    std::vector<double> G(rays, 0.0);
    for (int k = 1; k <= rays / 2; ++k) {
      std::complex<double> hat = 0.0;
      for (int j = 0; j < rays; ++j) hat += g[j] * std::exp(cplx(0, -k * j * ht_));
      hat /= static_cast<double>(rays);
      const double weight = k == rays / 2 ? 0.5 : 1.0;
      for (int j = 0; j < rays; ++j)
        G[j] += weight * 2.0 * (hat * std::exp(cplx(0, k * j * ht_)) / cplx(0, k)).real();
    }
    ray_.build(periodic_rows(g), rays + 2 * pad + 1, 4);
    anti_.build(periodic_rows(G), rays + 2 * pad + 1, 4);

    // Phi(s, t) = (1/s^2) int_0^s f(r, t) r dr, cumulative Simpson per ray,
    // rows for negative s taken from the opposite ray.
    const int ms = radial + 2 * pad + 1, mt = rays + 2 * pad + 1;
    std::vector<std::vector<double>> phi(rays, std::vector<double>(radial + pad + 1));
    const double center = (f(c_) - excess_) / 2;
    for (int j = 0; j < rays; ++j) {
      const double t = j * ht_;
      double F = 0.0, prev = 0.0;
      phi[j][0] = center;
      for (int i = 1; i <= radial + pad; ++i) {
        const double s0 = (i - 1) * hs_, s1 = i * hs_, sm = 0.5 * (s0 + s1);
        const double cur = at(s1, t) * s1;
        F += hs_ / 6 * (prev + 4 * at(sm, t) * sm + cur);
        prev = cur;
        phi[j][i] = F / (s1 * s1) - excess_ / 2;
      }
    }
    std::vector<double> table(static_cast<std::size_t>(ms) * mt);
    for (int a = 0; a < ms; ++a)
      for (int b = 0; b < mt; ++b) {
        const int i = a - pad;
        int j = ((b - pad) % rays + rays) % rays;
        if (i < 0) j = (j + rays / 2) % rays;
        table[static_cast<std::size_t>(a) * mt + b] = phi[j][std::abs(i)];
      }
    phi_.build(std::move(table), ms, mt);
  }

  Vec2 operator()(const Vec2& x) const {
    const Vec2 d = x - c_;
    const double s = d.norm();
    double t = std::atan2(d.y(), d.x());
    if (t < 0) t += 2 * pi;
    const double u = t / ht_ + pad;
    double phi = phi_(s / hs_ + pad, u);
    Vec2 v = Vec2::Zero();
    if (s > edge_[0]) {
      phi -= ray_(u, 1.5) * moment(s) / (norm_ * s * s);
      if (s < edge_[3]) v = bump(s) * anti_(u, 1.5) / norm_ * Vec2(d.y(), -d.x());
    }
    return v - phi * d;
  }

  /// Mean of f over the domain; the field solves div v = excess - f.
  double excess() const { return excess_; }

 private:
  static constexpr int pad = 8;

  std::vector<double> periodic_rows(const std::vector<double>& g) const {
    const int mt = rays_ + 2 * pad + 1;
    std::vector<double> out(static_cast<std::size_t>(mt) * 4);
    for (int b = 0; b < mt; ++b)
      for (int c = 0; c < 4; ++c) out[static_cast<std::size_t>(b) * 4 + c] = g[((b - pad) % rays_ + rays_) % rays_];
    return out;
  }

  // Flat-topped bump rising on [e0, e1] and falling on [e2, e3], with its
  // moment int_0^s bump(r) r dr in closed form.
  static double smooth(double u) { return u * u * u * (10 + u * (-15 + 6 * u)); }
  // int_0^u smooth(v) (c0 + c1 v) dv
  static double ramp_moment(double u, double c0, double c1) {
    const double u4 = u * u * u * u;
    return c0 * u4 * (2.5 + u * (-3 + u)) + c1 * u4 * u * (2 + u * (-2.5 + u * 6.0 / 7.0));
  }
  double bump(double s) const {
    const auto& e = edge_;
    if (s <= e[0] || s >= e[3]) return 0.0;
    if (s < e[1]) return smooth((s - e[0]) / (e[1] - e[0]));
    if (s > e[2]) return 1.0 - smooth((s - e[2]) / (e[3] - e[2]));
    return 1.0;
  }
  double moment(double s) const {
    const auto& e = edge_;
    const double d1 = e[1] - e[0], d2 = e[3] - e[2];
    if (s <= e[0]) return 0.0;
    if (s < e[1]) return d1 * ramp_moment((s - e[0]) / d1, e[0], d1);
    const double rise = d1 * ramp_moment(1.0, e[0], d1);
    if (s <= e[2]) return rise + 0.5 * (s * s - e[1] * e[1]);
    const double t = std::min(s, e[3]);
    return rise + 0.5 * (t * t - e[1] * e[1]) - d2 * ramp_moment((t - e[2]) / d2, e[2], d2);
  }

  Vec2 c_;
  int rays_;
  std::array<double, 4> edge_{};
  double norm_ = 1, hs_ = 0, ht_ = 0, excess_ = 0;
  SplineField phi_, ray_, anti_;
};

}  // namespace detail

/// Moser correction of `psi` on U: returns psi o chi with chi the time-one flow
/// of v / mu_t, where mu_t = 1 + t (det D psi - 1) and div v = 1 - det D psi
/// with v tangent to the boundary.
inline GridMap2D moser_correct(const GridMap2D& psi, const PlanarDomain& U, MoserOptions opt = {}) {
  const bool rect = U.kind() == PlanarDomain::Kind::rectangle;
  const Box2& b = U.bounds();
  const int nx = opt.grid, ny = opt.grid;
  const double hx = (b.x1 - b.x0) / nx, hy = (b.y1 - b.y0) / ny;
  const int mx = nx + 1, my = ny + 1;
  auto id = [my](int i, int j) { return static_cast<std::size_t>(i) * my + j; };
  auto node = [&](int i, int j) { return Vec2(b.x0 + i * hx, b.y0 + j * hy); };

  std::vector<std::uint8_t> inside(static_cast<std::size_t>(mx) * my, 1);
  if (!rect)
    for (int i = 0; i <= nx; ++i)
      for (int j = 0; j <= ny; ++j) inside[id(i, j)] = U.contains(node(i, j)) ? 1 : 0;

  std::vector<double> f(inside.size(), 0.0);
  double integral = 0.0, measure = 0.0;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) {
      const std::size_t k = id(i, j);
      if (!inside[k]) continue;
      const double w = rect ? (i == 0 || i == nx ? 0.5 : 1.0) * (j == 0 || j == ny ? 0.5 : 1.0) : 1.0;
      f[k] = psi.det(node(i, j)) - 1.0;
      integral += w * f[k];
      measure += w;
    }
  if (std::abs(integral / measure) > 1e-3)
    throw MoserError("area mismatch before Moser correction: mean density excess " + std::to_string(integral / measure));

  auto density = psi.det;
  double excess = 0.0;
  std::function<Vec2(const Vec2&)> field;
  if (rect) {
    const std::vector<double> theta = detail::neumann_poisson_dct(f, nx, ny, hx, hy);
    // Gradient on nodes; mirror ghosts make the normal component vanish on the edges.
    std::vector<double> gx(inside.size(), 0.0), gy(inside.size(), 0.0);
    auto th = [&](int i, int j) {
      i = i < 0 ? -i : (i > nx ? 2 * nx - i : i);
      j = j < 0 ? -j : (j > ny ? 2 * ny - j : j);
      return theta[id(i, j)];
    };
    for (int i = 0; i <= nx; ++i)
      for (int j = 0; j <= ny; ++j) {
        gx[id(i, j)] = (th(i + 1, j) - th(i - 1, j)) / (2 * hx);
        gy[id(i, j)] = (th(i, j + 1) - th(i, j - 1)) / (2 * hy);
      }
    // Parity extension: the normal component is odd across an edge, the tangential one even.
    constexpr int pad = 8;
    const int ex = mx + 2 * pad, ey = my + 2 * pad;
    auto extend = [&](const std::vector<double>& g, bool odd_x, bool odd_y) {
      std::vector<double> e(static_cast<std::size_t>(ex) * ey);
      for (int a = 0; a < ex; ++a)
        for (int c = 0; c < ey; ++c) {
          int i = a - pad, j = c - pad;
          double sign = 1.0;
          if (i < 0 || i > nx) {
            i = i < 0 ? -i : 2 * nx - i;
            if (odd_x) sign = -sign;
          }
          if (j < 0 || j > ny) {
            j = j < 0 ? -j : 2 * ny - j;
            if (odd_y) sign = -sign;
          }
          e[static_cast<std::size_t>(a) * ey + c] = sign * g[id(i, j)];
        }
      return e;
    };
    auto sx = std::make_shared<detail::SplineField>();
    auto sy = std::make_shared<detail::SplineField>();
    sx->build(extend(gx, true, false), ex, ey);
    sy->build(extend(gy, false, true), ex, ey);
    const double x0 = b.x0, y0 = b.y0;
    field = [=](const Vec2& x) {
      const double u = (x.x() - x0) / hx + pad, v = (x.y() - y0) / hy + pad;
      return Vec2(-(*sx)(u, v), -(*sy)(u, v));
    };
  } else {
    auto div = std::make_shared<detail::StarDivergence>(U, [density](const Vec2& x) { return density(x) - 1.0; });
    field = [div](const Vec2& x) { return (*div)(x); };
    excess = div->excess();
  }

  auto velocity = [field, density, excess](const Vec2& x, double t) {
    return Vec2(field(x) / (1.0 + t * (density(x) - 1.0 - excess)));
  };
  const int steps = opt.steps;
  auto flow = [=](Vec2 x) {
    const double dt = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = s * dt;
      const Vec2 k1 = velocity(x, t);
      const Vec2 k2 = velocity(x + 0.5 * dt * k1, t + 0.5 * dt);
      const Vec2 k3 = velocity(x + 0.5 * dt * k2, t + 0.5 * dt);
      const Vec2 k4 = velocity(x + dt * k3, t + dt);
      x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
  };
  auto outer = psi.map;
  GridMap2D g = sample_grid(U, [outer, flow](const Vec2& x) { return outer(flow(x)); },
                            [](const Vec2&) { return 1.0; }, opt.grid, !rect);
  g.branch = psi.branch + "+moser";
  grid_jacobian(g);
  if (g.max_jacobian_deviation() > opt.tol)
    throw MoserError("Jacobian residual " + std::to_string(g.max_jacobian_deviation()) + " above tolerance");
  return g;
}

/// Area of phi(U) from the shoelace formula on a fine boundary polygon.
inline double image_area(const PlanarDomain& U, const std::function<Vec2(const Vec2&)>& phi, int samples = 200000) {
  double a = 0.0;
  Vec2 prev = phi(U.center() + U.radius(0.0) * Vec2(1, 0));
  for (int k = 1; k <= samples; ++k) {
    const double t = 2 * pi * k / samples;
    const Vec2 cur = phi(U.center() + U.radius(t) * Vec2(std::cos(t), std::sin(t)));
    a += prev.x() * cur.y() - cur.x() * prev.y();
    prev = cur;
  }
  return 0.5 * a;
}

struct VolumeEmbedOptions {
  MoserOptions moser{};
  /// When false, a failed Jacobian certificate is reported instead of thrown.
  bool strict = true;
};

/// Area-preserving embedding of U into the open disc of area c about the origin.
inline GridMap2D volume_embed(const PlanarDomain& U, double c, VolumeEmbedOptions opt = {}) {
  if (!(c > U.area())) throw std::invalid_argument("volume_embed needs c > |U|");
  const double r = std::sqrt(c / pi), r0 = std::sqrt(U.area() / pi);
  const int grid = opt.moser.grid;
  const Vec2 c0 = U.center();
  if (U.kind() == PlanarDomain::Kind::disc) {
    GridMap2D g = sample_grid(U, [c0](const Vec2& x) { return Vec2(x - c0); }, [](const Vec2&) { return 1.0; }, grid, true);
    g.branch = "homothety";
    probe_jacobian(g);
    return g;
  }
  if (U.kind() == PlanarDomain::Kind::ellipse) {
    const double a = U.semi_a(), bb = U.semi_b(), th = U.angle();
    Eigen::Matrix2d rot;
    rot << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    const Eigen::Matrix2d m = Eigen::Vector2d(std::sqrt(bb / a), std::sqrt(a / bb)).asDiagonal() * rot;
    GridMap2D g = sample_grid(U, [m, c0](const Vec2& x) { return Vec2(m * (x - c0)); },
                              [](const Vec2&) { return 1.0; }, grid, true);
    g.branch = "affine";
    probe_jacobian(g);
    return g;
  }
  auto phi = std::make_shared<RadialEmbedding>(U, r, r0);
  const double lambda = std::sqrt(U.area() / image_area(U, [phi](const Vec2& x) { return (*phi)(x); }));
  GridMap2D psi;
  psi.map = [phi, lambda](const Vec2& x) { return Vec2(lambda * (*phi)(x)); };
  psi.det = [phi, lambda](const Vec2& x) { return lambda * lambda * phi->det(x); };
  psi.branch = "radial";
  try {
    return moser_correct(psi, U, opt.moser);
  } catch (const MoserError&) {
    if (opt.strict) throw;
    MoserOptions loose = opt.moser;
    loose.tol = unbounded;
    return moser_correct(psi, U, loose);
  }
}

}  // namespace symcap
