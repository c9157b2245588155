#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace symcap {

/// Gauss-Legendre nodes and weights on [-1, 1].
template <int N>
struct GaussLegendre {
  std::array<double, N> x{};
  std::array<double, N> w{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double z = std::cos(3.141592653589793 * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += w[i] * f(c + r * x[i]);
    return s * r;
  }
};

/// Smooth transition: 0 for t <= 0, 1 for t >= 1.
inline double transition(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

inline double transition_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  const double da = a / (t * t), db = -b / ((1.0 - t) * (1.0 - t));
  return (da * b - a * db) / ((a + b) * (a + b));
}

/// 1 on [lo, hi], 0 outside [lo - w, hi + w], smooth in between.
inline double plateau(double x, double lo, double hi, double w) {
  if (x < lo) return transition((x - (lo - w)) / w);
  if (x > hi) return transition(((hi + w) - x) / w);
  return 1.0;
}

inline double plateau_derivative(double x, double lo, double hi, double w) {
  if (x < lo) return transition_derivative((x - (lo - w)) / w) / w;
  if (x > hi) return -transition_derivative(((hi + w) - x) / w) / w;
  return 0.0;
}

/// C-infinity step: exactly 0 on [0, delta], exactly 1 on [1 - delta, 1],
/// the normalized integral of exp(-1/(u(1-u))) in between.
class SmoothStep {
 public:
  explicit SmoothStep(double delta = 0.1) : delta_(delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("step plateau must lie in (0, 1/2)");
    cumulative_.resize(panels + 1, 0.0);
    for (int k = 0; k < panels; ++k)
      cumulative_[k + 1] = cumulative_[k] + gl_.integrate(bump, double(k) / panels, double(k + 1) / panels);
    total_ = cumulative_[panels];
  }

  double delta() const { return delta_; }

  double operator()(double s) const {
    if (s <= delta_) return 0.0;
    if (s >= 1.0 - delta_) return 1.0;
    const double u = (s - delta_) / (1.0 - 2.0 * delta_);
    const int k = std::min(panels - 1, static_cast<int>(u * panels));
    return (cumulative_[k] + gl_.integrate(bump, double(k) / panels, u)) / total_;
  }

  double derivative(double s) const {
    if (s <= delta_ || s >= 1.0 - delta_) return 0.0;
    const double u = (s - delta_) / (1.0 - 2.0 * delta_);
    return bump(u) / (total_ * (1.0 - 2.0 * delta_));
  }

  /// Smallest s in [0, 1] with step(s) = v.
  double inverse(double v) const {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0 - delta_;
    double lo = delta_, hi = 1.0 - delta_;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((*this)(mid) < v ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  static constexpr int panels = 64;
  static double bump(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::exp(-1.0 / (u * (1.0 - u)));
  }

  double delta_;
  GaussLegendre<16> gl_{};
  std::vector<double> cumulative_;
  double total_ = 1.0;
};

}  // namespace symcap
