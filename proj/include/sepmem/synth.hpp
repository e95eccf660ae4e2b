#pragma once

#include "sepmem/geometry.hpp"
#include "sepmem/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sepmem {

/// n points uniformly distributed on a sphere centered at the origin.
PointCloud gen_sphere(std::size_t n, double radius, std::uint64_t seed);

/// Ellipsoid with semi-axes (1, 0.75, 0.6) and two Gaussian lobes of height 0.35
/// along (0, 1, 0) and (−0.6, 0, 0.8), as a closed latitude/longitude mesh with
/// `rings` latitude bands and 2·rings longitudes.
TriangleMesh bumpy_ellipsoid_mesh(int rings = 128);

/// n points distributed uniformly by area on bumpy_ellipsoid_mesh().
PointCloud gen_bumpy_ellipsoid(std::size_t n, std::uint64_t seed);

/// Adds an "intensity" channel drawn uniformly from [lo, hi].
PointCloud paint_intensity(const PointCloud& cloud, double lo, double hi, std::uint64_t seed);

/// Appends one Gaussian-perturbed duplicate per point. sigma is a fraction of the
/// bounding-box diagonal. Duplicates get dark random intensity when the cloud has
/// intensity and 0 in every other channel.
PointCloud add_duplicated_outliers(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// One strip of the plane, spanning [x0, x1) along x.
struct PlaneRegion {
  double x0 = 0.0;
  double x1 = 1.0;
  double spacing = 0.02;
  double intensity = 0.5;
};

/// Plane z = 0 over x ∈ regions, y ∈ [0, height).
struct PlaneSpec {
  double height = 1.0;
  std::vector<PlaneRegion> regions;
  /// Uniform in-plane jitter as a fraction of the local spacing.
  double jitter = 0.1;
};

/// Grid-sampled plane with "intensity" per region and a measured "density"
/// channel (neighbor count per unit volume).
PointCloud gen_colored_plane(const PlaneSpec& spec, std::uint64_t seed);

enum class CorruptionKind { gaussian_noise, duplicated_outliers, region_outliers, surface_outliers };

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::gaussian_noise;
  /// Fraction of the bounding-box diagonal.
  double sigma = 0.005;
  /// Injected points per input point (outlier kinds).
  double ratio = 1.0;
  std::uint64_t seed = 0;
};

/// Parses "kind" or "kind:key=value,..." with keys sigma, ratio and seed.
CorruptionSpec parse_corruption(const std::string& text);

/// gaussian_noise jitters every point. The other kinds append points: perturbed
/// duplicates, Gaussian blobs centered 1.2 diagonals from the cloud center, or
/// duplicates displaced along estimated outward normals.
PointCloud corrupt(const PointCloud& cloud, const CorruptionSpec& spec);

}  // namespace sepmem
