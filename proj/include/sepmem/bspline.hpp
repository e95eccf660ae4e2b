#pragma once

#include "sepmem/common.hpp"
#include "sepmem/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace sepmem {

using Vec2 = Eigen::Vector2d;

inline constexpr int kDegree = 3;

/// Cox–de Boor value N_{i,p}(t) over an arbitrary non-decreasing knot vector,
/// with 0/0 := 0. At the last knot the final non-empty span is treated as closed.
double basis(std::span<const double> knots, int i, int p, double t);

/// Cubic knot sequence for one parametric direction.
///
/// Clamped: the full knot vector (count + 4 entries, end knots repeated four
/// times). Periodic: count + 1 strictly increasing breakpoints, the last one
/// closing the period; extended knots repeat with that period.
class KnotVector {
 public:
  static KnotVector uniform_clamped(int count);
  static KnotVector uniform_periodic(int count);
  static KnotVector clamped(std::vector<double> knots);
  static KnotVector periodic(std::vector<double> breakpoints);

  [[nodiscard]] bool is_periodic() const { return periodic_; }
  /// Number of basis functions (control points in this direction).
  [[nodiscard]] int count() const { return count_; }
  [[nodiscard]] double lo() const;
  [[nodiscard]] double hi() const;

  /// Extended knot t_j. Any j for periodic, 0 ≤ j < count + 4 for clamped.
  [[nodiscard]] double knot(int j) const;

  /// Wraps periodic parameters into [lo, hi); checks the domain otherwise.
  [[nodiscard]] double normalize(double t) const;

  /// s with t_s ≤ t < t_{s+1}; the active basis functions are s−3 … s.
  [[nodiscard]] int span(double t) const;

  /// Control index for an extended basis index (wraps when periodic).
  [[nodiscard]] int control_index(int j) const;

  /// Values and first derivatives of the four active basis functions at t.
  void evaluate(double t, int& span_out, std::array<double, 4>& values, std::array<double, 4>& derivs) const;

  /// Non-empty parameter intervals of the domain.
  [[nodiscard]] std::vector<std::pair<double, double>> intervals() const;

  /// Stored knots (full clamped vector or periodic breakpoints).
  [[nodiscard]] const std::vector<double>& raw() const { return knots_; }

 private:
  KnotVector(bool periodic, std::vector<double> knots);

  bool periodic_ = false;
  int count_ = 0;
  std::vector<double> knots_;
};

enum class Direction { u, v };

/// Cubic tensor-product surface. Control point (i, j) has i along u and j along v.
///
/// v is always clamped. With `poles`, u must be periodic and the first and last
/// control rows in v each collapse to a single point, closing the surface.
class BSplineSurface {
 public:
  BSplineSurface(KnotVector u, KnotVector v, std::vector<Vec3> control, bool poles, int orientation = 1);

  [[nodiscard]] const KnotVector& knots_u() const { return u_; }
  [[nodiscard]] const KnotVector& knots_v() const { return v_; }
  [[nodiscard]] int count_u() const { return u_.count(); }
  [[nodiscard]] int count_v() const { return v_.count(); }
  [[nodiscard]] bool periodic_u() const { return u_.is_periodic(); }
  [[nodiscard]] bool has_poles() const { return poles_; }
  /// +1 or −1; multiplies ∂S/∂u × ∂S/∂v to give the outward normal.
  [[nodiscard]] int orientation() const { return orientation_; }
  [[nodiscard]] const std::vector<Vec3>& control() const { return control_; }
  [[nodiscard]] const Vec3& control(int i, int j) const { return control_[static_cast<std::size_t>(i + j * count_u())]; }

  [[nodiscard]] Vec3 evaluate(double u, double v) const;

  struct Derivatives {
    Vec3 point, du, dv;
  };
  [[nodiscard]] Derivatives derivatives(double u, double v) const;

  /// Unit outward normal; throws NumericalError where the tangents are degenerate.
  [[nodiscard]] Vec3 normal(double u, double v) const;

  [[nodiscard]] BSplineSurface with_orientation(int orientation) const;

 private:
  KnotVector u_, v_;
  std::vector<Vec3> control_;
  bool poles_ = false;
  int orientation_ = 1;
};

struct SampleGrid {
  int u_n = 0, v_n = 0;
  std::vector<Vec2> params;   // index i + j·u_n
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<bool> degenerate;  // normal taken from neighboring samples

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Samples equispaced in knot-interval index (plain equispaced for uniform knots).
/// A periodic direction omits the seam duplicate; the pole direction stays
/// strictly inside the domain; other clamped directions include both ends.
SampleGrid sample_grid(const BSplineSurface& surface, int u_n, int v_n);

/// Control points minimizing Σ‖S(u_s, v_s) − x_s‖² over the given knots.
///
/// Normal equations carry a 1e-10 ridge on the diagonal; one step of iterative
/// refinement removes the ridge bias for well-determined systems.
BSplineSurface fit_least_squares(std::span<const Vec2> params, std::span<const Vec3> points, const KnotVector& u,
                                 const KnotVector& v, bool poles, int orientation = 1);

/// Inserts one knot at the midpoint of interval `interval_index` in the given
/// direction. The shape is unchanged; one control row or column is added.
BSplineSurface refine(const BSplineSurface& surface, Direction direction, int interval_index);

/// max(div_min, α(q − 1) + 1) rounded to the nearest integer.
int div_count(int q, double alpha, int div_min);

/// Triangulates the sample grid. Closed surfaces get a stitched seam and a
/// triangle fan at each pole, giving a watertight genus-0 mesh.
TriangleMesh to_mesh(const BSplineSurface& surface, int u_n, int v_n);

/// Fits a closed (periodic u, poles in v) surface with uniform knots to a
/// parametric target S*(u, v), u ∈ [0,1) around, v ∈ [0,1] from pole to pole.
BSplineSurface fit_closed_surface(const std::function<Vec3(double, double)>& target, int count_u, int count_v,
                                  int samples_u, int samples_v);

/// Unit sphere direction for closed-surface parameters: u is longitude, v runs from −z to +z.
Vec3 sphere_direction(double u, double v);

}  // namespace sepmem
