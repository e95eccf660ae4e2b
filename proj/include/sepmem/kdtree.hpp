#pragma once

#include "sepmem/common.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace sepmem {

struct Neighbor {
  std::uint32_t index;
  double distance;  // Euclidean
};

/// Static 3D kd-tree over a borrowed array of positions.
///
/// Neighbor order is (distance, index) ascending, so results are identical to
/// a brute-force sort with the same tie rule. The tree never copies the
/// positions; the owner must keep them alive and unchanged.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 12);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] bool empty() const { return points_.empty(); }

  [[nodiscard]] std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;

  /// Nearest point; the tree must be non-empty.
  [[nodiscard]] Neighbor nearest(const Vec3& query) const;

  /// Indices of points with ‖p − center‖ ≤ radius, in ascending index order.
  [[nodiscard]] std::vector<std::uint32_t> radius(const Vec3& center, double radius) const;

  /// Indices of points inside the closed axis-aligned box, in ascending index order.
  [[nodiscard]] std::vector<std::uint32_t> box(const Vec3& lo, const Vec3& hi) const;

  /// Indices of points accepted by `keep_point`, in ascending index order.
  /// Subtrees whose bounds (lo, hi) fail `may_overlap` are skipped, so that test
  /// must be conservative.
  template <typename NodeTest, typename PointTest>
  [[nodiscard]] std::vector<std::uint32_t> select(NodeTest may_overlap, PointTest keep_point) const {
    std::vector<std::uint32_t> out;
    if (nodes_.empty()) return out;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
      const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (!may_overlap(n.lo, n.hi)) continue;
      if (n.left < 0) {
        for (std::uint32_t i = n.begin; i < n.end; ++i) {
          if (keep_point(points_[order_[i]])) out.push_back(order_[i]);
        }
        continue;
      }
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Node {
    Vec3 lo, hi;              // bounds of the points below this node
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size);

  std::span<const Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace sepmem
