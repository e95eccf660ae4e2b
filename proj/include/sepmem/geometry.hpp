#pragma once

#include "sepmem/common.hpp"
#include "sepmem/kdtree.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sepmem {

struct BoundingBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  [[nodiscard]] Vec3 center() const { return 0.5 * (min + max); }
  [[nodiscard]] Vec3 extent() const { return max - min; }
  [[nodiscard]] double diagonal() const { return (max - min).norm(); }
};

/// Bounding box of a non-empty point set.
BoundingBox bounding_box(std::span<const Vec3> points);

/// Oriented rectangular region. Axis 0 is the depth direction (surface normal
/// when used by the membrane), axes 1 and 2 are height and width.
struct Cuboid {
  Vec3 center = Vec3::Zero();
  std::array<Vec3, 3> axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  Vec3 extents = Vec3::Ones();  // full lengths (depth, height, width)

  /// Throws InvalidArgument when the frame is not orthonormal within 1e-9 or an extent is not positive.
  void validate() const;

  [[nodiscard]] double volume() const { return extents.prod(); }

  /// Closed containment: |⟨p − center, axis⟩| ≤ extent/2 on every axis.
  [[nodiscard]] bool contains(const Vec3& p) const;

  /// Signed coordinate of p along the depth axis, relative to the center.
  [[nodiscard]] double depth_of(const Vec3& p) const { return axes[0].dot(p - center); }

  /// Conservative axis-aligned bounds.
  [[nodiscard]] BoundingBox aabb() const;
};

/// Right-handed orthonormal frame {n, t1, t2} with n normalized from `direction`.
std::array<Vec3, 3> orthonormal_frame(const Vec3& direction);

/// Positions plus named per-point scalar channels, with an immutable spatial index.
///
/// Ingestion rejects non-finite coordinates. Copies rebuild the index so it
/// always refers to the owning object's storage.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> positions, std::map<std::string, std::vector<double>> attributes = {});

  PointCloud(const PointCloud& other);
  PointCloud& operator=(const PointCloud& other);
  PointCloud(PointCloud&&) noexcept = default;
  PointCloud& operator=(PointCloud&&) noexcept = default;

  [[nodiscard]] std::size_t size() const { return positions_.size(); }
  [[nodiscard]] bool empty() const { return positions_.empty(); }
  [[nodiscard]] const std::vector<Vec3>& positions() const { return positions_; }
  [[nodiscard]] const Vec3& operator[](std::size_t i) const { return positions_[i]; }

  [[nodiscard]] const std::map<std::string, std::vector<double>>& attributes() const { return attributes_; }
  [[nodiscard]] bool has_attribute(const std::string& name) const { return attributes_.contains(name); }
  /// Throws InvalidArgument for an unknown channel.
  [[nodiscard]] const std::vector<double>& attribute(const std::string& name) const;
  void set_attribute(const std::string& name, std::vector<double> values);

  [[nodiscard]] const KdTree& index() const { return index_; }
  [[nodiscard]] BoundingBox bounds() const;

 private:
  std::vector<Vec3> positions_;
  std::map<std::string, std::vector<double>> attributes_;
  KdTree index_;
};

/// Builds a spatial index; errors with "empty cloud" on empty input.
KdTree build_index(std::span<const Vec3> positions);

/// Mean distance from point `point_id` to its k nearest other points.
double mean_knn_distance(const PointCloud& cloud, std::size_t point_id, std::size_t k);

/// Mean knn distance for every point of the cloud.
std::vector<double> knn_spacing(const PointCloud& cloud, std::size_t k);

/// Mean of the members' knn distances; neighbors are searched over the whole cloud.
double local_density(const PointCloud& cloud, std::span<const std::uint32_t> member_ids, std::size_t k);

/// local_density over all points.
double global_density(const PointCloud& cloud, std::size_t k);

struct CuboidQuery {
  std::size_t count = 0;
  std::vector<std::uint32_t> ids;  // ascending
};

CuboidQuery points_in_cuboid(const PointCloud& cloud, const Cuboid& cuboid);

/// Points per unit volume within `radius` of each point (the point itself included).
std::vector<double> neighbor_count_density(const PointCloud& cloud, double radius);

}  // namespace sepmem
