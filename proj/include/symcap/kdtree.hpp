#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace symcap {

/// Exact nearest-neighbour queries on a point-major array of `dim`-vectors.
/// The tree refers to the caller's storage, which must outlive it.
class KdTree {
 public:
  KdTree(const double* data, std::size_t count, int dim) : data_(data), count_(count), dim_(dim) {
    index_.resize(count);
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    if (count > 0) {
      nodes_.reserve(2 * count / leaf_size + 2);
      build(0, count);
    }
  }

  std::size_t size() const { return count_; }

  struct Hit {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest point, optionally ignoring one index.
  Hit nearest(const double* x, std::size_t skip = npos) const {
    Hit best;
    double best2 = std::numeric_limits<double>::infinity();
    if (count_ > 0) search(0, x, skip, best.index, best2);
    best.distance = std::sqrt(best2);
    return best;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  static constexpr std::size_t leaf_size = 16;

  struct Node {
    std::size_t begin, end;
    int axis = -1;
    double split = 0.0;
    std::size_t left = 0, right = 0;
  };

  double coord(std::size_t i, int a) const { return data_[i * dim_ + a]; }

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= leaf_size) return id;
    int axis = 0;
    double spread = -1.0;
    for (int a = 0; a < dim_; ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t k = begin; k < end; ++k) {
        const double v = coord(index_[k], a);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > spread) {
        spread = hi - lo;
        axis = a;
      }
    }
    if (spread <= 0.0) return id;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                     [&](std::size_t i, std::size_t j) { return coord(i, axis) < coord(j, axis); });
    const double split = coord(index_[mid], axis);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::size_t id, const double* x, std::size_t skip, std::size_t& best, double& best2) const {
    const Node& nd = nodes_[id];
    if (nd.axis < 0) {
      for (std::size_t k = nd.begin; k < nd.end; ++k) {
        const std::size_t i = index_[k];
        if (i == skip) continue;
        double d2 = 0.0;
        for (int a = 0; a < dim_ && d2 < best2; ++a) {
          const double t = coord(i, a) - x[a];
          d2 += t * t;
        }
        if (d2 < best2) {
          best2 = d2;
          best = i;
        }
      }
      return;
    }
    const double diff = x[nd.axis] - nd.split;
    const std::size_t first = diff < 0 ? nd.left : nd.right;
    const std::size_t second = diff < 0 ? nd.right : nd.left;
    search(first, x, skip, best, best2);
    if (diff * diff < best2) search(second, x, skip, best, best2);
  }

  const double* data_;
  std::size_t count_;
  int dim_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace symcap
