#pragma once

#include "sepmem/mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sepmem {

/// Points on a surface with one unit normal each (normals may be empty for raw clouds).
struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
};

struct FScore {
  double f = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct MetricsReport {
  double chamfer = 0.0;
  double fscore = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double normal_consistency = 0.0;
  double threshold = 0.0;
};

/// Area-weighted uniform samples; each normal is its face normal. Deterministic per seed.
SurfaceSamples sample_mesh(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// ½·mean_a min_b ‖a − b‖ + ½·mean_b min_a ‖b − a‖.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

/// Precision: fraction of a within tau of b. Recall: fraction of b within tau of a.
FScore fscore(std::span<const Vec3> a, std::span<const Vec3> b, double tau);

/// Mean |n_a · n_nn(a)|, averaged over both directions.
double normal_consistency(const SurfaceSamples& a, const SurfaceSamples& b);

/// Unsigned PCA normals from the k nearest neighbors of each point.
std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t k = 16);

/// All metrics between a prediction and a ground truth. Missing normals are
/// estimated; tau is tau_fraction of the ground truth's bounding-box diagonal.
MetricsReport evaluate(const SurfaceSamples& pred, const SurfaceSamples& gt, double tau_fraction = 0.01);

}  // namespace sepmem
