#pragma once

#include "symcap/core.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace symcap {

/// Cyclic spectrum generator * Z; generator 0 is the trivial spectrum unless
/// `dense` marks a Minkowski sum of incommensurable generators.
struct ActionSpectrum {
  double generator = 0.0;
  std::string provenance;
  bool dense = false;
  /// For dense spectra: smallest positive element found in the enumeration window.
  std::optional<double> window_infimum;

  double min_positive() const {
    if (generator > 0.0) return generator;
    if (dense) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
};

inline ActionSpectrum ap_spectrum(double scale, int n) {
  if (n < 2) throw std::invalid_argument("the Lagrangian spectrum needs n >= 2");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  return {0.5 * pi * scale * scale, "ap-lagrangian", false, std::nullopt};
}

/// Odd sphere of the given radius in its own complex space; leaves are Hopf circles.
inline ActionSpectrum sphere_spectrum(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  return {pi * radius * radius, "sphere", false, std::nullopt};
}

inline ActionSpectrum torus_spectrum(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  return {pi * radius * radius, "torus", false, std::nullopt};
}

struct RealGcdOptions {
  int depth = 64;
  double tol = 1e-9;
};

/// Largest c with a, b in cZ, found from the continued fraction of a/b with
/// denominators up to `depth`; 0 when no such rational is within tolerance.
inline double real_gcd(double a, double b, RealGcdOptions opt = {}) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("real_gcd needs positive inputs");
  const double x = a / b;
  double rest = x;
  std::int64_t p0 = 1, q0 = 0;
  std::int64_t p1 = static_cast<std::int64_t>(std::floor(rest)), q1 = 1;
  rest -= std::floor(rest);
  for (;;) {
    if (q1 > opt.depth) return 0.0;
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= opt.tol * std::max(1.0, x))
      return b / static_cast<double>(q1);
    if (rest < 1e-300) return 0.0;
    rest = 1.0 / rest;
    const auto digit = static_cast<std::int64_t>(std::floor(rest));
    rest -= static_cast<double>(digit);
    const std::int64_t p2 = digit * p1 + p0, q2 = digit * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
}

/// Minkowski sum cZ + c'Z.
inline ActionSpectrum product_spectrum(const ActionSpectrum& s, const ActionSpectrum& t,
                                       RealGcdOptions opt = {}, double window = 10.0) {
  if (s.generator < 0.0 || t.generator < 0.0) throw std::invalid_argument("negative generator");
  const std::string tag = "product(" + s.provenance + "," + t.provenance + ")";
  if (s.dense || t.dense) return {0.0, tag, true, 0.0};
  if (s.generator == 0.0) return {t.generator, tag, false, std::nullopt};
  if (t.generator == 0.0) return {s.generator, tag, false, std::nullopt};
  const double g = real_gcd(s.generator, t.generator, opt);
  if (g > 0.0) return {g, tag, false, std::nullopt};
  double best = std::numeric_limits<double>::infinity();
  const auto span = static_cast<std::int64_t>(std::ceil(window / t.generator));
  for (std::int64_t j = -span; j <= span; ++j) {
    const double base = static_cast<double>(j) * t.generator;
    const double i = std::round(-base / s.generator);
    for (double di = -1; di <= 1; ++di) {
      const double v = std::abs(base + (i + di) * s.generator);
      if (v > 1e-12 && v < best) best = v;
    }
  }
  return {0.0, tag, true, best};
}

/// r L x S_{r'}: an (m = 2n-d-1)-dimensional Lagrangian factor times a
/// (2d-2n+1)-dimensional sphere.
struct CoisoProductSpec {
  double lagrangian_scale;
  double sphere_radius;
  int n;
  int d;

  int lagrangian_half_dim() const { return 2 * n - d - 1; }
  int sphere_dim() const { return 2 * d - 2 * n + 1; }
  bool valid() const { return d >= n + 1 && d <= 2 * n - 3; }
  double squared_radius() const {
    return lagrangian_scale * lagrangian_scale + sphere_radius * sphere_radius;
  }

  /// Split with r^2/2 = r'^2 inside the ball of radius r.
  static CoisoProductSpec balanced(double r, int n, int d) {
    return {std::sqrt(2.0 / 3.0) * r, std::sqrt(1.0 / 3.0) * r, n, d};
  }
};

inline double coiso_product_area(const CoisoProductSpec& spec, RealGcdOptions opt = {}) {
  const double r = spec.lagrangian_scale, rp = spec.sphere_radius;
  if (!(r > 0.0) || !(rp > 0.0)) throw std::invalid_argument("radii must be positive");
  return pi * real_gcd(0.5 * r * r, rp * rp, opt);
}

struct SplitResult {
  double r2 = 0.0;
  double rp2 = 0.0;
  double value = 0.0;
  int max_denominator = 0;
  std::vector<std::pair<double, double>> curve;
};

/// Maximizes pi gcd{r^2/2, c - r^2} over r^2 = c p/q, q up to a bound chosen
/// so the grid has at most `resolution` points.
inline SplitResult optimal_split(double c, int resolution = 10000) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("optimal_split needs 0 < c < 1");
  if (resolution < 2) throw std::invalid_argument("resolution too small");
  auto farey_size = [](int q) {
    std::int64_t count = 0;
    for (int d = 2; d <= q; ++d)
      for (int p = 1; p < d; ++p)
        if (std::gcd(p, d) == 1) ++count;
    return count;
  };
  int qmax = 2;
  while (farey_size(qmax + 1) <= resolution) ++qmax;

  std::vector<std::pair<int, int>> grid;
  for (int d = 2; d <= qmax; ++d)
    for (int p = 1; p < d; ++p)
      if (std::gcd(p, d) == 1) grid.emplace_back(p, d);
  std::sort(grid.begin(), grid.end(), [](auto x, auto y) {
    return static_cast<std::int64_t>(x.first) * y.second < static_cast<std::int64_t>(y.first) * x.second;
  });

  SplitResult out;
  out.max_denominator = qmax;
  const RealGcdOptions opt{4 * qmax, 1e-9};
  for (auto [p, d] : grid) {
    const double r2 = c * p / d;
    const double v = pi * real_gcd(0.5 * r2, c - r2, opt);
    out.curve.emplace_back(r2, v);
    if (v > out.value + 1e-12) {
      out.value = v;
      out.r2 = r2;
      out.rp2 = c - r2;
    }
  }
  return out;
}

struct LedgerRow {
  int n;
  int d;
  double lower;
  std::string lower_provenance;
  double upper;
  std::string upper_provenance;
  double witness_r = 0.0;
  double witness_area = 0.0;
  bool contractible_leaves = true;
};

struct CapacityLedger {
  int n;
  std::vector<LedgerRow> rows;
  double torus_capacity;

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "n,d,lower,lower_provenance,upper,upper_provenance,witness_r,witness_area\n";
    for (const auto& r : rows)
      os << r.n << ',' << r.d << ',' << r.lower << ',' << r.lower_provenance << ',' << r.upper << ','
         << r.upper_provenance << ',' << r.witness_r << ',' << r.witness_area << '\n';
    return os.str();
  }
};

/// Lower and upper bounds on the coisotropic capacities of the unit ball for
/// d = n..2n-1. Computed rows carry a witness radius and its spectrum value.
inline CapacityLedger capacity_ledger(int n, double witness_r = 0.99) {
  if (n < 2) throw std::invalid_argument("capacity_ledger needs n >= 2");
  CapacityLedger out{n, {}, pi / n};
  for (int d = n; d <= 2 * n - 1; ++d) {
    LedgerRow row{n, d, 0.0, "", pi, "cited", 0.0, 0.0, true};
    if (d == n) {
      const ActionSpectrum s = ap_spectrum(witness_r, n);
      row.witness_r = witness_r;
      row.witness_area = s.min_positive();
      row.lower = ap_spectrum(1.0, n).min_positive();
      row.lower_provenance = "computed";
    } else if (d <= 2 * n - 3) {
      const auto spec = CoisoProductSpec::balanced(witness_r, n, d);
      const ActionSpectrum s = product_spectrum(ap_spectrum(spec.lagrangian_scale, spec.lagrangian_half_dim()),
                                                sphere_spectrum(spec.sphere_radius));
      row.witness_r = witness_r;
      row.witness_area = s.min_positive();
      const auto unit = CoisoProductSpec::balanced(1.0, n, d);
      row.lower = coiso_product_area(unit);
      row.lower_provenance = "computed";
    } else if (d == 2 * n - 2) {
      row.lower = pi / 2;
      row.lower_provenance = "cited";
    } else {
      row.lower = pi;
      row.lower_provenance = "cited";
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace symcap
