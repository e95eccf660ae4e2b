#pragma once

#include "sepmem/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sepmem {

/// Actual (o) and estimated non-data (b) point counts of one region.
struct RegionCounts {
  std::int64_t o = 0;
  std::int64_t b = 0;
  [[nodiscard]] std::int64_t n() const { return o + b; }
};

/// Ordered weights [w_point, w_attr1, ..., w_attrd].
struct SeparabilityWeights {
  std::vector<double> w{1.0};

  /// Throws InvalidArgument on a negative weight or a zero sum.
  void validate() const;
};

enum class DensityMode { global, per_region };

/// Fisher ratio σ_b²/σ_T² between two sets of scalar values; 0 for constant data.
double attribute_separability(std::span<const double> values1, std::span<const double> values2);

/// Non-data points that fill `region_volume` at spacing `delta`, minus the o actual points; clamped at 0.
std::int64_t nondata_count(double region_volume, double delta, std::int64_t o);

/// Fisher ratio of binary occupancy computed from counts alone.
double point_separability(const RegionCounts& r1, const RegionCounts& r2);

/// Weighted mean Σ w_j η_j / Σ w_j.
double weighted_separability(std::span<const double> eta, const SeparabilityWeights& weights);

struct SeparabilitySettings {
  std::size_t k = 8;
  DensityMode density_mode = DensityMode::global;
  SeparabilityWeights weights;
  /// Attribute channels matching weights[1..].
  std::vector<std::string> attributes;
};

/// Read-only evaluation state shared by every separability query on one cloud:
/// the per-point knn spacing, the global spacing, and the attribute channels.
class SeparabilityContext {
 public:
  SeparabilityContext(const PointCloud& cloud, SeparabilitySettings settings);

  [[nodiscard]] const PointCloud& cloud() const { return *cloud_; }
  [[nodiscard]] const SeparabilitySettings& settings() const { return settings_; }
  [[nodiscard]] const std::vector<double>& spacing() const { return spacing_; }
  [[nodiscard]] double global_spacing() const { return global_spacing_; }
  [[nodiscard]] std::span<const double> channel(std::size_t a) const { return *channels_[a]; }
  [[nodiscard]] std::size_t channel_count() const { return channels_.size(); }

  /// δ for a merged region with the given members (global δ in global mode).
  [[nodiscard]] double spacing_for(std::span<const std::uint32_t> members) const;

 private:
  const PointCloud* cloud_;
  SeparabilitySettings settings_;
  std::vector<double> spacing_;
  double global_spacing_ = 0.0;
  std::vector<const std::vector<double>*> channels_;
};

struct PairSeparability {
  double eta_w = 0.0;
  std::vector<double> eta;  // [η_p, η_a1, ...]
  bool flagged = false;     // no evidence: empty union or a region without any point or cell
};

/// Separability between two adjacent cuboids. A point lying in both (on the
/// shared face) belongs to cuboid1.
PairSeparability region_pair_separability(const SeparabilityContext& ctx, const Cuboid& cuboid1,
                                          const Cuboid& cuboid2);

struct SplitResult {
  double eta_star = 0.0;
  double split_offset = 0.0;        // along the depth axis, relative to the cuboid center
  std::vector<double> per_attribute;  // η̄ at the best split
  bool flagged = false;             // every split lacked evidence
};

/// Depth offsets swept by max_split_separability: n equispaced values strictly inside (−M_d/2, M_d/2).
std::vector<double> split_offsets(double depth, int n_splits);

/// Sweeps an internal boundary through the search cuboid along its depth axis.
///
/// Region 1 is the inner part (depth ≤ offset), region 2 the outer part. The
/// union is the whole cuboid at every offset, so δ and the attribute totals
/// are computed once and each split costs O(log n). Ties go to the offset
/// nearest the center, then to the inner one; a zero maximum yields offset 0.
SplitResult max_split_separability(const SeparabilityContext& ctx, const Cuboid& search, int n_splits);

struct GridSpec {
  Vec3 origin = Vec3::Zero();
  Vec3 step = Vec3::Ones();
  std::array<int, 3> counts{1, 1, 1};

  [[nodiscard]] std::size_t size() const;
  /// Points in x-fastest order.
  [[nodiscard]] std::vector<Vec3> points() const;
};

/// Two windows of size (d, h, w) on either side of each grid point along `direction`.
std::vector<double> separability_map(const SeparabilityContext& ctx, const GridSpec& grid, const Vec3& direction,
                                     const Vec3& window_dims);

}  // namespace sepmem
