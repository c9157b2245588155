#pragma once

#include "symcap/core.hpp"
#include "symcap/kdtree.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace symcap {

/// Finite sample of a subset of R^{2n}, point-major, with a part label per point.
struct SampledSet {
  int n = 0;
  std::vector<double> data;
  std::vector<std::uint8_t> part;
  std::vector<std::string> part_names{"points"};
  double fill_distance = 0.0;

  SampledSet() = default;
  explicit SampledSet(int half_dim) : n(half_dim) {}

  int dim() const { return 2 * n; }
  std::size_t size() const { return n == 0 ? 0 : data.size() / (2 * n); }
  bool empty() const { return size() == 0; }
  const double* point(std::size_t i) const { return data.data() + i * 2 * n; }
  Eigen::Map<const Vec> at(std::size_t i) const { return Eigen::Map<const Vec>(point(i), 2 * n); }

  void reserve(std::size_t count) {
    data.reserve(count * 2 * n);
    part.reserve(count);
  }
  void add(const Vec& x, std::uint8_t label = 0) {
    if (x.size() != 2 * n) throw DimensionError("point dimension differs from the set");
    data.insert(data.end(), x.data(), x.data() + x.size());
    part.push_back(label);
  }
  void add(const PhasePoint& x, std::uint8_t label = 0) { add(x.coords(), label); }

  std::size_t count_part(std::uint8_t label) const {
    return static_cast<std::size_t>(std::count(part.begin(), part.end(), label));
  }

  /// Largest extent of the axis-aligned bounding box.
  double box_extent() const {
    double ext = 0.0;
    for (int c = 0; c < dim(); ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < size(); ++i) {
        lo = std::min(lo, data[i * dim() + c]);
        hi = std::max(hi, data[i * dim() + c]);
      }
      ext = std::max(ext, hi - lo);
    }
    return ext;
  }

  SampledSet mapped(const std::function<Vec(const Vec&)>& f) const {
    SampledSet out(n);
    out.part_names = part_names;
    out.fill_distance = fill_distance;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.add(f(at(i)), part[i]);
    return out;
  }
};

/// Fill-distance proxy for sets without a parametrization: the largest
/// nearest-neighbour spacing over a random subset of samples.
inline double nearest_neighbour_spacing(const SampledSet& set, std::size_t probes = 2000,
                                        std::uint64_t seed = 7) {
  if (set.size() < 2) return 0.0;
  const KdTree tree(set.data.data(), set.size(), set.dim());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  const bool all = set.size() <= probes;
  const std::size_t count = all ? set.size() : probes;
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = all ? k : pick(rng);
    worst = std::max(worst, tree.nearest(set.point(i), i).distance);
  }
  return worst;
}

/// Little-endian uint64 n, uint64 count, then 2n blocks of `count` doubles.
inline void write_point_cloud(const SampledSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const std::uint64_t header[2] = {static_cast<std::uint64_t>(set.n), set.size()};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  std::vector<double> column(set.size());
  for (int c = 0; c < set.dim(); ++c) {
    for (std::size_t i = 0; i < set.size(); ++i) column[i] = set.data[i * set.dim() + c];
    out.write(reinterpret_cast<const char*>(column.data()),
              static_cast<std::streamsize>(column.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline SampledSet read_point_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t header[2];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || header[0] == 0 || header[0] > 1024) throw std::runtime_error("bad point-cloud header in " + path);
  SampledSet set(static_cast<int>(header[0]));
  const std::size_t count = header[1];
  set.data.assign(count * set.dim(), 0.0);
  set.part.assign(count, 0);
  std::vector<double> column(count);
  for (int c = 0; c < set.dim(); ++c) {
    in.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated point cloud " + path);
    for (std::size_t i = 0; i < count; ++i) set.data[i * set.dim() + c] = column[i];
  }
  return set;
}

inline void write_point_csv(const SampledSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  for (int j = 0; j < set.n; ++j) out << 'q' << j + 1 << ',';
  for (int j = 0; j < set.n; ++j) out << 'p' << j + 1 << ',';
  out << "part\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (int c = 0; c < set.dim(); ++c) out << set.data[i * set.dim() + c] << ',';
    const std::uint8_t label = set.part[i];
    out << (label < set.part_names.size() ? set.part_names[label] : std::to_string(label)) << '\n';
  }
}

}  // namespace symcap
