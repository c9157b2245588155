#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace symcap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A point of R^{2n} stored as (q_1..q_n, p_1..p_n).
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(int n) : n_(n), x_(Vec::Zero(2 * n)) {
    if (n < 1) throw DimensionError("half-dimension must be positive");
  }
  PhasePoint(int n, Vec coords) : n_(n), x_(std::move(coords)) {
    if (n < 1) throw DimensionError("half-dimension must be positive");
    if (x_.size() != 2 * n) throw DimensionError("coordinate length must be 2n");
  }

  static PhasePoint from_complex(const CVec& z) {
    const int n = static_cast<int>(z.size());
    PhasePoint x(n);
    for (int j = 0; j < n; ++j) {
      x.x_[j] = z[j].real();
      x.x_[n + j] = z[j].imag();
    }
    return x;
  }

  CVec complex() const {
    CVec z(n_);
    for (int j = 0; j < n_; ++j) z[j] = cplx(x_[j], x_[n_ + j]);
    return z;
  }

  int n() const { return n_; }
  const Vec& coords() const { return x_; }
  Vec& coords() { return x_; }
  double q(int j) const { return x_[j]; }
  double p(int j) const { return x_[n_ + j]; }
  double operator[](int i) const { return x_[i]; }
  double norm() const { return x_.norm(); }

 private:
  int n_ = 0;
  Vec x_;
};

/// Standard complex structure J = [[0, I], [-I, 0]] so that omega0(u, v) = u^T J v.
inline Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return j;
}

inline double omega0(const Vec& u, const Vec& v) {
  if (u.size() != v.size() || u.size() % 2 != 0 || u.size() == 0)
    throw DimensionError("omega0 needs two vectors of the same even length");
  const Eigen::Index n = u.size() / 2;
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) s += u[j] * v[n + j] - u[n + j] * v[j];
  return s;
}

/// Closed curve t in [0,1] -> R^{2n} with M+1 cached samples on the uniform grid.
class Loop {
 public:
  using Eval = std::function<PhasePoint(double)>;
  using Deriv = std::function<Vec(double)>;

  Loop() = default;
  Loop(int n, Eval eval, Deriv derivative = {}, int samples = 2048)
      : n_(n), m_(samples), eval_(std::move(eval)), deriv_(std::move(derivative)) {
    if (m_ < 4) throw std::invalid_argument("loop needs at least 4 samples");
    grid_.resize(2 * n_, m_ + 1);
    for (int i = 0; i <= m_; ++i) {
      PhasePoint x = eval_(static_cast<double>(i) / m_);
      if (x.n() != n_) throw DimensionError("loop evaluation has the wrong dimension");
      grid_.col(i) = x.coords();
    }
  }

  int n() const { return n_; }
  int size() const { return m_; }
  PhasePoint operator()(double t) const { return eval_(t); }
  PhasePoint sample(int i) const { return PhasePoint(n_, grid_.col(i)); }
  const Mat& grid() const { return grid_; }
  bool has_derivative() const { return static_cast<bool>(deriv_); }
  Vec derivative(double t) const { return deriv_(t); }
  const Eval& evaluator() const { return eval_; }
  const Deriv& differentiator() const { return deriv_; }

  double closure_gap() const { return (grid_.col(0) - grid_.col(m_)).norm(); }

  /// Same curve resampled on a different grid.
  Loop resampled(int samples) const { return Loop(n_, eval_, deriv_, samples); }

 private:
  int n_ = 0;
  int m_ = 0;
  Eval eval_;
  Deriv deriv_;
  Mat grid_;
};

/// Tangent vectors on the sample grid: analytic when available, else periodic
/// fourth-order central differences.
inline Mat loop_tangents(const Loop& x) {
  const int m = x.size();
  Mat d(2 * x.n(), m);
  if (x.has_derivative()) {
    for (int i = 0; i < m; ++i) d.col(i) = x.derivative(static_cast<double>(i) / m);
    return d;
  }
  const Mat& g = x.grid();
  const double h = 1.0 / m;
  auto at = [&](int i) { return g.col(((i % m) + m) % m); };
  for (int i = 0; i < m; ++i)
    d.col(i) = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
  return d;
}

/// Integral of q . dp around the loop; order 2 is the trapezoid rule, 4 is Simpson.
inline double liouville_integral(const Loop& x, int order = 4) {
  if (order < 2) throw std::invalid_argument("quadrature order must be at least 2");
  const int m = x.size();
  const int n = x.n();
  const Mat& g = x.grid();
  if (!g.allFinite()) throw std::domain_error("loop has non-finite samples");
  const double scale = std::max(1.0, g.col(0).norm());
  if (x.closure_gap() > 1e-12 * scale) throw std::domain_error("loop is not closed");
  const Mat d = loop_tangents(x);
  std::vector<double> f(m + 1);
  for (int i = 0; i < m; ++i) f[i] = g.col(i).head(n).dot(d.col(i).tail(n));
  f[m] = f[0];
  const double h = 1.0 / m;
  double s = 0.0;
  if (order < 4 || m % 2 != 0) {
    for (int i = 0; i < m; ++i) s += f[i];
    return s * h;
  }
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return (s + f[0] + f[m]) * h / 3.0;
}

using PhaseMap = std::function<Vec(const Vec&)>;

/// max_ij |(D^T J D - J)_ij| over the probes, D from central differences.
inline double symplecticity_defect(const PhaseMap& map, const std::vector<Vec>& probes,
                                   double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const Vec& x = probes[k];
    const Eigen::Index dim = x.size();
    if (dim % 2 != 0) throw DimensionError("probe has odd length");
    Mat d(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      Vec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      Vec fp = map(xp), fm = map(xm);
      if (fp.size() != dim || fm.size() != dim || !fp.allFinite() || !fm.allFinite())
        throw std::runtime_error("map evaluation failed at probe " + std::to_string(k));
      d.col(c) = (fp - fm) / (2.0 * h);
    }
    const Mat j = standard_j(static_cast<int>(dim / 2));
    worst = std::max(worst, (d.transpose() * j * d - j).cwiseAbs().maxCoeff());
  }
  return worst;
}

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

/// Open ball B^{2n}(a) of radius sqrt(a/pi).
struct BallSpec {
  double a;
  double radius() const { return std::sqrt(a / pi); }
};

/// Z^{2n}(a) = B^2(a) x R^{2n-2}; only (q_1, p_1) is constrained.
struct CylinderSpec {
  double a;
  double radius() const { return std::sqrt(a / pi); }
};

/// Product of discs, one radius per complex coordinate; `unbounded` drops a factor.
struct PolydiscSpec {
  std::vector<double> radii;
  static PolydiscSpec unit(int n) { return {std::vector<double>(n, 1.0)}; }
};

}  // namespace symcap
