#include "sepmem/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace sepmem {

namespace {

double box_distance_sq(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (q[a] < lo[a]) {
      d = lo[a] - q[a];
    } else if (q[a] > hi[a]) {
      d = q[a] - hi[a];
    }
    d2 += d * d;
  }
  return d2;
}

struct Candidate {
  double d2;
  std::uint32_t index;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

}  // namespace

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size) : points_(points) {
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points.empty()) {
    nodes_.reserve(2 * points.size() / std::max<std::size_t>(leaf_size, 1) + 1);
    build(0, static_cast<std::uint32_t>(points.size()), std::max<std::size_t>(leaf_size, 1));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = points_[order_[begin]];
  node.hi = node.lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    node.lo = node.lo.cwiseMin(points_[order_[i]]);
    node.hi = node.hi.cwiseMax(points_[order_[i]]);
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size) return id;

  int axis = 0;
  (node.hi - node.lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
  const std::int32_t left = build(begin, mid, leaf_size);
  const std::int32_t right = build(mid, end, leaf_size);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<Neighbor> KdTree::knn(const Vec3& query, std::size_t k) const {
  std::vector<Neighbor> out;
  if (k == 0 || nodes_.empty()) return out;
  k = std::min(k, points_.size());

  std::priority_queue<Candidate> heap;  // worst candidate on top
  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if (heap.size() == k && box_distance_sq(query, n.lo, n.hi) > heap.top().d2) return;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t idx = order_[i];
        const Candidate c{(points_[idx] - query).squaredNorm(), idx};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double dl = box_distance_sq(query, nodes_[n.left].lo, nodes_[n.left].hi);
    const double dr = box_distance_sq(query, nodes_[n.right].lo, nodes_[n.right].hi);
    if (dl <= dr) {
      self(self, n.left);
      self(self, n.right);
    } else {
      self(self, n.right);
      self(self, n.left);
    }
  };
  visit(visit, 0);

  out.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = Neighbor{heap.top().index, std::sqrt(heap.top().d2)};
    heap.pop();
  }
  return out;
}

Neighbor KdTree::nearest(const Vec3& query) const {
  if (nodes_.empty()) throw InvalidArgument("nearest on an empty tree");
  Candidate best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::uint32_t>::max()};
  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t idx = order_[i];
        const Candidate c{(points_[idx] - query).squaredNorm(), idx};
        if (c < best) best = c;
      }
      return;
    }
    const double dl = box_distance_sq(query, nodes_[n.left].lo, nodes_[n.left].hi);
    const double dr = box_distance_sq(query, nodes_[n.right].lo, nodes_[n.right].hi);
    const bool left_first = dl <= dr;
    const std::int32_t first = left_first ? n.left : n.right;
    const std::int32_t second = left_first ? n.right : n.left;
    if ((left_first ? dl : dr) <= best.d2) self(self, first);
    if ((left_first ? dr : dl) <= best.d2) self(self, second);
  };
  visit(visit, 0);
  return Neighbor{best.index, std::sqrt(best.d2)};
}

std::vector<std::uint32_t> KdTree::radius(const Vec3& center, double r) const {
  std::vector<std::uint32_t> out;
  if (nodes_.empty() || r < 0.0) return out;
  const double r2 = r * r;
  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if (box_distance_sq(center, n.lo, n.hi) > r2) return;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        if ((points_[order_[i]] - center).squaredNorm() <= r2) out.push_back(order_[i]);
      }
      return;
    }
    self(self, n.left);
    self(self, n.right);
  };
  visit(visit, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> KdTree::box(const Vec3& lo, const Vec3& hi) const {
  std::vector<std::uint32_t> out;
  if (nodes_.empty()) return out;
  auto inside = [&](const Vec3& p) {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  };
  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& n = nodes_[id];
    if ((n.hi.array() < lo.array()).any() || (n.lo.array() > hi.array()).any()) return;
    if (n.left < 0 || (inside(n.lo) && inside(n.hi))) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        if (inside(points_[order_[i]])) out.push_back(order_[i]);
      }
      return;
    }
    self(self, n.left);
    self(self, n.right);
  };
  visit(visit, 0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sepmem
