#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "curvem/types.hpp"

namespace curvem {

// Uniform hash grid over axis-aligned boxes in R^n (n <= 8). Built once,
// read-only afterwards.
class SpatialGrid {
 public:
  SpatialGrid(int n, double cell_size) : n_(n), h_(cell_size > 0 ? cell_size : 1.0) {}

  void insert_box(int id, const Vec& lo, const Vec& hi) {
    std::vector<std::int64_t> lo_i(n_), hi_i(n_);
    for (int a = 0; a < n_; ++a) {
      lo_i[a] = static_cast<std::int64_t>(std::floor(lo(a) / h_));
      hi_i[a] = static_cast<std::int64_t>(std::floor(hi(a) / h_));
    }
    walk_boxes(lo_i, hi_i, [&](std::uint64_t key) { buckets_[key].push_back(id); });
    if (items_ <= id) items_ = id + 1;
  }

  // Ids of boxes within the grid cells overlapping B(p, radius).
  // May contain duplicates; caller filters.
  void query_ball(const Vec& p, double radius, std::vector<int>& out) const {
    out.clear();
    std::vector<std::int64_t> lo_i(n_), hi_i(n_);
    for (int a = 0; a < n_; ++a) {
      lo_i[a] = static_cast<std::int64_t>(std::floor((p(a) - radius) / h_));
      hi_i[a] = static_cast<std::int64_t>(std::floor((p(a) + radius) / h_));
    }
    walk_boxes(lo_i, hi_i, [&](std::uint64_t key) {
      auto it = buckets_.find(key);
      if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    });
  }

  double cell_size() const { return h_; }
  int item_count() const { return items_; }

 private:
  template <class Fn>
  void walk_boxes(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi,
                  Fn&& fn) const {
    std::vector<std::int64_t> idx(lo);
    for (;;) {
      fn(hash_key(idx));
      int a = 0;
      while (a < n_ && ++idx[a] > hi[a]) idx[a] = lo[a], ++a;
      if (a == n_) break;
    }
  }

  std::uint64_t hash_key(const std::vector<std::int64_t>& idx) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int a = 0; a < n_; ++a) {
      h ^= static_cast<std::uint64_t>(idx[a]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  int n_;
  double h_;
  int items_ = 0;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

}  // namespace curvem
