#pragma once

#include "sepmem/bspline.hpp"
#include "sepmem/geometry.hpp"
#include "sepmem/mesh.hpp"
#include "sepmem/separability.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sepmem {

/// Length that the search extents are fractions of.
enum class SearchScale {
  cloud,     // bounding-box diagonal of the input cloud, fixed for the run
  membrane,  // bounding-box diagonal of the current membrane, updated every iteration
};

struct MembraneConfig {
  std::size_t k = 8;
  double beta = 0.5;
  /// (M_d, M_h, M_w) as fractions of the reference diagonal.
  Vec3 search_extents{0.3, 0.1, 0.1};
  SearchScale search_scale = SearchScale::membrane;
  /// Scale M_h and M_w by search_reference_grid / current grid (u and v) once the
  /// grid is finer than the reference, so each cuboid keeps covering about one
  /// control-point span. Never below shrink_floor × the mean knn spacing.
  bool shrink_search = true;
  std::array<int, 2> search_reference_grid{8, 5};
  double shrink_floor = 2.0;
  int n_splits = 63;
  SeparabilityWeights weights;
  /// Attribute channels matching weights.w[1..].
  std::vector<std::string> attributes;
  DensityMode density_mode = DensityMode::global;
  double g_min = 1e-3;
  int patience = 3;
  std::array<int, 2> init_grid{8, 5};
  std::array<int, 2> max_grid{40, 25};
  std::array<int, 2> refine_increment{1, 1};
  /// Only intervals at least this fraction of the widest one may be split, so
  /// repeated refinement cannot pile knots into one spot.
  double refine_min_width = 0.5;
  double alpha = 2.0;
  int div_min = 4;
  int max_iterations = 100;
  /// Initial octagon offset from the extreme points, as a fraction of the cloud diagonal.
  double margin = 0.05;
  /// Output mesh samples (u around, v pole to pole).
  std::array<int, 2> mesh_resolution{96, 48};
  /// Write zero wall times so traces are byte-reproducible.
  bool deterministic = false;
  /// Compute the per-iteration Chamfer to the input; NaN in the trace when off.
  bool trace_chamfer = true;

  /// Throws InvalidArgument when a value violates its range.
  void validate() const;
};

struct TraceRecord {
  int iteration = 0;
  double eta_g = 0.0;
  int M = 0, L = 0;
  int u_n = 0, v_n = 0;
  double chamfer = 0.0;  // mesh vertices to input cloud, NaN when not traced
  double seconds = 0.0;
};

using RunTrace = std::vector<TraceRecord>;

/// CSV with header iteration,eta_g,M,L,u_n,v_n,chamfer,seconds.
void write_trace_csv(const RunTrace& trace, std::ostream& out);

struct MembraneState {
  explicit MembraneState(BSplineSurface s) : surface(std::move(s)) {}

  BSplineSurface surface;
  int iteration = 0;
  std::vector<double> eta_history;
  int stagnation = 0;
  /// Sample parameters and η* of the latest iteration, used to place refinements.
  std::vector<Vec2> sample_params;
  std::vector<double> sample_eta;
};

/// Extreme points in the order +x, −x, +y, −y, +z, −z; ties go to the lowest index.
std::array<Vec3, 6> extreme_points(const PointCloud& cloud);

/// Closed initial membrane around the extreme points, pushed out by `margin`.
///
/// The target shape is the box through the extremes with its twelve edges and
/// eight corners cut by planes tangent to the inscribed ellipsoid, so it hugs
/// round objects while still enclosing the whole box. Grids finer than 8×5 are
/// fitted at 8×5 and then refined, which leaves the shape unchanged.
BSplineSurface init_octagon(const PointCloud& cloud, double margin, std::array<int, 2> grid);

/// Samples per direction for the surface's current grid.
std::array<int, 2> sample_counts(const BSplineSurface& surface, const MembraneConfig& config);

/// One evolution step: sample, search along each normal, move, refit, record η_g.
/// Leaves `state` untouched when the refit fails.
void iterate(MembraneState& state, const SeparabilityContext& ctx, const MembraneConfig& config);

/// Refines the grid on stagnation while below max_grid, else counts the stagnant
/// iteration. Returns true when the surface gained control points.
bool adjust(MembraneState& state, const MembraneConfig& config);

bool should_stop(const MembraneState& state, const MembraneConfig& config);

struct Reconstruction {
  BSplineSurface surface;
  TriangleMesh mesh;
  RunTrace trace;
};

/// The whole pipeline: initialize, then iterate / adjust until should_stop.
Reconstruction reconstruct(const PointCloud& cloud, const MembraneConfig& config);

}  // namespace sepmem
