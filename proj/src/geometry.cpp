#include "sepmem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sepmem {

BoundingBox bounding_box(std::span<const Vec3> points) {
  if (points.empty()) throw InvalidArgument("empty cloud");
  BoundingBox box{points.front(), points.front()};
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

void Cuboid::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(extents[i] > 0.0) || !std::isfinite(extents[i])) throw InvalidArgument("cuboid extents must be positive");
    if (std::abs(axes[i].norm() - 1.0) > 1e-9) throw InvalidArgument("cuboid axes must be unit length");
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(axes[i].dot(axes[j])) > 1e-9) throw InvalidArgument("cuboid axes must be orthogonal");
    }
  }
}

bool Cuboid::contains(const Vec3& p) const {
  const Vec3 d = p - center;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axes[i].dot(d)) > 0.5 * extents[i]) return false;
  }
  return true;
}

BoundingBox Cuboid::aabb() const {
  Vec3 half = Vec3::Zero();
  for (int i = 0; i < 3; ++i) half += 0.5 * extents[i] * axes[i].cwiseAbs();
  // Pad so rounding in the projection test can never reject a point the box kept out.
  half.array() += 1e-12 * (half.norm() + center.cwiseAbs().maxCoeff());
  return {center - half, center + half};
}

std::array<Vec3, 3> orthonormal_frame(const Vec3& direction) {
  const double len = direction.norm();
  if (!(len > 0.0) || !std::isfinite(len)) throw InvalidArgument("frame direction must be non-zero");
  const Vec3 n = direction / len;
  // Duff et al., "Building an Orthonormal Basis, Revisited".
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double b = n.x() * n.y() * a;
  Vec3 t1(1.0 + sign * n.x() * n.x() * a, sign * b, -sign * n.x());
  Vec3 t2(b, sign + n.y() * n.y() * a, -n.y());
  // Keep {n, t1, t2} right-handed.
  if (n.cross(t1).dot(t2) < 0.0) std::swap(t1, t2);
  return {n, t1.normalized(), t2.normalized()};
}

PointCloud::PointCloud(std::vector<Vec3> positions, std::map<std::string, std::vector<double>> attributes)
    : positions_(std::move(positions)), attributes_(std::move(attributes)) {
  for (const Vec3& p : positions_) {
    if (!p.allFinite()) throw InvalidArgument("point cloud contains non-finite coordinates");
  }
  for (const auto& [name, values] : attributes_) {
    if (values.size() != positions_.size()) throw InvalidArgument("attribute '" + name + "' has wrong length");
  }
  index_ = KdTree(positions_);
}

PointCloud::PointCloud(const PointCloud& other)
    : positions_(other.positions_), attributes_(other.attributes_), index_(positions_) {}

PointCloud& PointCloud::operator=(const PointCloud& other) {
  if (this != &other) {
    positions_ = other.positions_;
    attributes_ = other.attributes_;
    index_ = KdTree(positions_);
  }
  return *this;
}

const std::vector<double>& PointCloud::attribute(const std::string& name) const {
  auto it = attributes_.find(name);
  if (it == attributes_.end()) throw InvalidArgument("unknown attribute '" + name + "'");
  return it->second;
}

void PointCloud::set_attribute(const std::string& name, std::vector<double> values) {
  if (values.size() != positions_.size()) throw InvalidArgument("attribute '" + name + "' has wrong length");
  attributes_[name] = std::move(values);
}

BoundingBox PointCloud::bounds() const { return bounding_box(positions_); }

KdTree build_index(std::span<const Vec3> positions) {
  if (positions.empty()) throw InvalidArgument("empty cloud");
  for (const Vec3& p : positions) {
    if (!p.allFinite()) throw InvalidArgument("non-finite position");
  }
  return KdTree(positions);
}

double mean_knn_distance(const PointCloud& cloud, std::size_t point_id, std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (k >= cloud.size()) throw InvalidArgument("k too large");
  if (point_id >= cloud.size()) throw InvalidArgument("point id out of range");
  const auto neighbors = cloud.index().knn(cloud[point_id], k + 1);
  double sum = 0.0;
  std::size_t used = 0;
  for (const Neighbor& nb : neighbors) {
    if (nb.index == point_id) continue;
    if (used == k) break;
    sum += nb.distance;
    ++used;
  }
  return sum / static_cast<double>(k);
}

std::vector<double> knn_spacing(const PointCloud& cloud, std::size_t k) {
  std::vector<double> d(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) d[i] = mean_knn_distance(cloud, i, k);
  return d;
}

double local_density(const PointCloud& cloud, std::span<const std::uint32_t> member_ids, std::size_t k) {
  if (member_ids.empty()) throw InvalidArgument("empty member set");
  double sum = 0.0;
  for (std::uint32_t id : member_ids) sum += mean_knn_distance(cloud, id, k);
  return sum / static_cast<double>(member_ids.size());
}

double global_density(const PointCloud& cloud, std::size_t k) {
  if (cloud.size() < k + 1) throw InvalidArgument("k too large");
  const auto d = knn_spacing(cloud, k);
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

CuboidQuery points_in_cuboid(const PointCloud& cloud, const Cuboid& cuboid) {
  cuboid.validate();
  const Vec3 half = 0.5 * cuboid.extents;
  Vec3 reach = Vec3::Zero();  // half extent of the cuboid's axis-aligned bounds
  for (int i = 0; i < 3; ++i) reach += half[i] * cuboid.axes[i].cwiseAbs();
  // Separating-axis test on the three world axes and the three cuboid axes,
  // padded so rounding never prunes a node holding a contained point.
  auto may_overlap = [&](const Vec3& lo, const Vec3& hi) {
    const Vec3 c = 0.5 * (lo + hi) - cuboid.center;
    const Vec3 h = 0.5 * (hi - lo);
    const double pad = 1e-12 * (reach.norm() + h.norm() + cuboid.center.cwiseAbs().maxCoeff() + hi.cwiseAbs().maxCoeff());
    if ((c.cwiseAbs() - h - reach).maxCoeff() > pad) return false;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(cuboid.axes[i].dot(c)) > half[i] + h.dot(cuboid.axes[i].cwiseAbs()) + pad) return false;
    }
    return true;
  };
  CuboidQuery out;
  out.ids = cloud.index().select(may_overlap, [&](const Vec3& p) { return cuboid.contains(p); });
  out.count = out.ids.size();
  return out;
}

std::vector<double> neighbor_count_density(const PointCloud& cloud, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("density radius must be positive");
  const double volume = 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out[i] = static_cast<double>(cloud.index().radius(cloud[i], radius).size()) / volume;
  }
  return out;
}

}  // namespace sepmem
