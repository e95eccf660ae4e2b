#include "sepmem/bspline.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sepmem {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

double basis(std::span<const double> knots, int i, int p, double t) {
  const int m = static_cast<int>(knots.size());
  if (p < 0) throw InvalidArgument("negative degree");
  if (i < 0 || i + p + 1 >= m) throw InvalidArgument("basis index out of range");
  if (p == 0) {
    const double a = knots[static_cast<std::size_t>(i)];
    const double b = knots[static_cast<std::size_t>(i + 1)];
    if (a <= t && t < b) return 1.0;
    // Close the last non-empty span at the final knot.
    if (t == knots.back() && a < b && b == knots.back()) return 1.0;
    return 0.0;
  }
  const auto k = [&](int j) { return knots[static_cast<std::size_t>(j)]; };
  const double left = safe_ratio(t - k(i), k(i + p) - k(i));
  const double right = safe_ratio(k(i + p + 1) - t, k(i + p + 1) - k(i + 1));
  double value = 0.0;
  if (left != 0.0) value += left * basis(knots, i, p - 1, t);
  if (right != 0.0) value += right * basis(knots, i + 1, p - 1, t);
  return value;
}

// ---------------------------------------------------------------------------
// KnotVector

KnotVector::KnotVector(bool periodic, std::vector<double> knots) : periodic_(periodic), knots_(std::move(knots)) {
  for (double k : knots_) {
    if (!std::isfinite(k)) throw InvalidArgument("knots must be finite");
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) throw InvalidArgument("knots must be non-decreasing");
  if (periodic_) {
    count_ = static_cast<int>(knots_.size()) - 1;
    if (count_ < 3) throw InvalidArgument("periodic cubic needs at least 3 control points");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      if (!(knots_[i] < knots_[i + 1])) throw InvalidArgument("periodic breakpoints must be strictly increasing");
    }
  } else {
    count_ = static_cast<int>(knots_.size()) - kDegree - 1;
    if (count_ < kDegree + 1) throw InvalidArgument("clamped cubic needs at least 4 control points");
    for (int j = 1; j <= kDegree; ++j) {
      if (knots_[static_cast<std::size_t>(j)] != knots_.front() || knots_[knots_.size() - 1 - j] != knots_.back()) {
        throw InvalidArgument("clamped knots must repeat the end values four times");
      }
    }
    if (!(knots_.front() < knots_.back())) throw InvalidArgument("empty knot domain");
  }
}

KnotVector KnotVector::uniform_clamped(int count) {
  if (count < kDegree + 1) throw InvalidArgument("clamped cubic needs at least 4 control points");
  std::vector<double> k;
  const int spans = count - kDegree;
  for (int j = 0; j < kDegree; ++j) k.push_back(0.0);
  for (int j = 0; j <= spans; ++j) k.push_back(static_cast<double>(j) / spans);
  for (int j = 0; j < kDegree; ++j) k.push_back(1.0);
  return KnotVector(false, std::move(k));
}

KnotVector KnotVector::uniform_periodic(int count) {
  if (count < 3) throw InvalidArgument("periodic cubic needs at least 3 control points");
  std::vector<double> k;
  for (int j = 0; j <= count; ++j) k.push_back(static_cast<double>(j) / count);
  return KnotVector(true, std::move(k));
}

KnotVector KnotVector::clamped(std::vector<double> knots) { return KnotVector(false, std::move(knots)); }

KnotVector KnotVector::periodic(std::vector<double> breakpoints) { return KnotVector(true, std::move(breakpoints)); }

double KnotVector::lo() const { return periodic_ ? knots_.front() : knots_[kDegree]; }

double KnotVector::hi() const {
  return periodic_ ? knots_.back() : knots_[static_cast<std::size_t>(count_)];
}

double KnotVector::knot(int j) const {
  if (periodic_) {
    const int q = floor_div(j, count_);
    const int r = j - q * count_;
    return knots_[static_cast<std::size_t>(r)] + q * (hi() - lo());
  }
  if (j < 0 || j >= static_cast<int>(knots_.size())) throw InvalidArgument("knot index out of range");
  return knots_[static_cast<std::size_t>(j)];
}

double KnotVector::normalize(double t) const {
  if (!std::isfinite(t)) throw InvalidArgument("parameter must be finite");
  const double a = lo();
  const double b = hi();
  if (periodic_) {
    double w = a + std::fmod(t - a, b - a);
    if (w < a) w += b - a;
    if (w >= b) w = a;
    return w;
  }
  const double tol = 1e-12 * (b - a);
  if (t < a - tol || t > b + tol) throw InvalidArgument("parameter outside the knot domain");
  return std::clamp(t, a, b);
}

int KnotVector::span(double t) const {
  t = normalize(t);
  if (periodic_) {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return std::clamp(static_cast<int>(it - knots_.begin()) - 1, 0, count_ - 1);
  }
  const auto first = knots_.begin() + kDegree;
  const auto last = knots_.begin() + count_ + 1;
  int s = static_cast<int>(std::upper_bound(first, last, t) - knots_.begin()) - 1;
  s = std::clamp(s, kDegree, count_ - 1);
  while (s > kDegree && knot(s) == knot(s + 1)) --s;
  return s;
}

int KnotVector::control_index(int j) const {
  if (periodic_) {
    const int r = j % count_;
    return r < 0 ? r + count_ : r;
  }
  return j;
}

void KnotVector::evaluate(double t, int& s, std::array<double, 4>& values, std::array<double, 4>& derivs) const {
  t = normalize(t);
  s = span(t);
  // Triangular Cox–de Boor scheme, keeping the degree-2 row for the derivative.
  std::array<double, 4> n{1.0, 0.0, 0.0, 0.0};
  std::array<double, 4> left{}, right{};
  std::array<double, 3> quad{};
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = t - knot(s + 1 - j);
    right[j] = knot(s + j) - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = safe_ratio(n[r], right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
    if (j == kDegree - 1) std::copy_n(n.begin(), 3, quad.begin());
  }
  values = n;
  for (int r = 0; r <= kDegree; ++r) {
    const int i = s - kDegree + r;
    double d = 0.0;
    if (r >= 1) d += safe_ratio(quad[r - 1], knot(i + 3) - knot(i));
    if (r <= 2) d -= safe_ratio(quad[r], knot(i + 4) - knot(i + 1));
    derivs[r] = kDegree * d;
  }
}

std::vector<std::pair<double, double>> KnotVector::intervals() const {
  std::vector<std::pair<double, double>> out;
  if (periodic_) {
    for (int i = 0; i < count_; ++i) out.emplace_back(knots_[i], knots_[i + 1]);
    return out;
  }
  for (int s = kDegree; s < count_; ++s) {
    if (knot(s) < knot(s + 1)) out.emplace_back(knot(s), knot(s + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// BSplineSurface

BSplineSurface::BSplineSurface(KnotVector u, KnotVector v, std::vector<Vec3> control, bool poles, int orientation)
    : u_(std::move(u)), v_(std::move(v)), control_(std::move(control)), poles_(poles), orientation_(orientation) {
  if (v_.is_periodic()) throw InvalidArgument("v direction must be clamped");
  if (control_.size() != static_cast<std::size_t>(u_.count()) * static_cast<std::size_t>(v_.count())) {
    throw InvalidArgument("control grid size does not match the knot vectors");
  }
  if (poles_ && !u_.is_periodic()) throw InvalidArgument("pole rows require a periodic u direction");
  if (orientation_ != 1 && orientation_ != -1) throw InvalidArgument("orientation must be +1 or -1");
  for (const Vec3& c : control_) {
    if (!c.allFinite()) throw InvalidArgument("control points must be finite");
  }
}

Vec3 BSplineSurface::evaluate(double u, double v) const { return derivatives(u, v).point; }

BSplineSurface::Derivatives BSplineSurface::derivatives(double u, double v) const {
  int su = 0, sv = 0;
  std::array<double, 4> nu{}, du{}, nv{}, dv{};
  u_.evaluate(u, su, nu, du);
  v_.evaluate(v, sv, nv, dv);
  Derivatives out{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int b = 0; b <= kDegree; ++b) {
    const int j = sv - kDegree + b;
    Vec3 row = Vec3::Zero();
    Vec3 row_du = Vec3::Zero();
    for (int a = 0; a <= kDegree; ++a) {
      const Vec3& q = control(u_.control_index(su - kDegree + a), j);
      row += nu[a] * q;
      row_du += du[a] * q;
    }
    out.point += nv[b] * row;
    out.du += nv[b] * row_du;
    out.dv += dv[b] * row;
  }
  return out;
}

Vec3 BSplineSurface::normal(double u, double v) const {
  const auto d = derivatives(u, v);
  const Vec3 c = d.du.cross(d.dv);
  const double scale = d.du.norm() * d.dv.norm();
  if (!(c.norm() > 1e-12 * scale) || scale == 0.0) throw NumericalError("degenerate tangents");
  return orientation_ * c.normalized();
}

BSplineSurface BSplineSurface::with_orientation(int orientation) const {
  return BSplineSurface(u_, v_, control_, poles_, orientation);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

std::vector<double> direction_params(const KnotVector& k, int n, bool interior) {
  // Equispaced in knot-interval index, so each interval receives its share of
  // samples however unevenly refinement has placed the knots.
  const auto spans = k.intervals();
  const double count = static_cast<double>(spans.size());
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double f;
    if (k.is_periodic()) {
      f = static_cast<double>(i) / n;
    } else if (interior) {
      f = static_cast<double>(i + 1) / (n + 1);
    } else {
      f = static_cast<double>(i) / (n - 1);
    }
    const double x = f * count;
    const auto idx = std::min(static_cast<std::size_t>(x), spans.size() - 1);
    const double frac = x - static_cast<double>(idx);
    const auto [a, b] = spans[idx];
    out[static_cast<std::size_t>(i)] = frac >= 1.0 ? b : a + frac * (b - a);
  }
  return out;
}

}  // namespace

SampleGrid sample_grid(const BSplineSurface& surface, int u_n, int v_n) {
  if (u_n < 2 || v_n < 2) throw InvalidArgument("sample counts must be at least 2");
  const auto us = direction_params(surface.knots_u(), u_n, false);
  const auto vs = direction_params(surface.knots_v(), v_n, surface.has_poles());

  SampleGrid g;
  g.u_n = u_n;
  g.v_n = v_n;
  const std::size_t total = static_cast<std::size_t>(u_n) * static_cast<std::size_t>(v_n);
  g.params.reserve(total);
  g.points.reserve(total);
  g.normals.assign(total, Vec3::Zero());
  g.degenerate.assign(total, false);
  for (int j = 0; j < v_n; ++j) {
    for (int i = 0; i < u_n; ++i) {
      const double u = us[static_cast<std::size_t>(i)];
      const double v = vs[static_cast<std::size_t>(j)];
      const std::size_t s = g.points.size();
      const auto d = surface.derivatives(u, v);
      g.params.emplace_back(u, v);
      g.points.push_back(d.point);
      const Vec3 c = d.du.cross(d.dv);
      const double scale = d.du.norm() * d.dv.norm();
      if (scale > 0.0 && c.norm() > 1e-12 * scale) {
        g.normals[s] = surface.orientation() * c.normalized();
      } else {
        g.degenerate[s] = true;
      }
    }
  }

  // Degenerate samples borrow the mean normal of their grid neighbors.
  const bool wrap = surface.periodic_u();
  for (int j = 0; j < v_n; ++j) {
    for (int i = 0; i < u_n; ++i) {
      const std::size_t s = static_cast<std::size_t>(i + j * u_n);
      if (!g.degenerate[s]) continue;
      Vec3 sum = Vec3::Zero();
      const std::array<std::pair<int, int>, 4> nbrs{{{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
      for (auto [a, b] : nbrs) {
        if (wrap) a = (a + u_n) % u_n;
        if (a < 0 || a >= u_n || b < 0 || b >= v_n) continue;
        const std::size_t t = static_cast<std::size_t>(a + b * u_n);
        if (!g.degenerate[t]) sum += g.normals[t];
      }
      if (sum.norm() > 0.0) g.normals[s] = sum.normalized();
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Least squares

BSplineSurface fit_least_squares(std::span<const Vec2> params, std::span<const Vec3> points, const KnotVector& u,
                                 const KnotVector& v, bool poles, int orientation) {
  if (params.size() != points.size()) throw InvalidArgument("params and points differ in length");
  if (v.is_periodic()) throw InvalidArgument("v direction must be clamped");
  if (poles && !u.is_periodic()) throw InvalidArgument("pole rows require a periodic u direction");
  const int m = u.count();
  const int l = v.count();
  const int unknowns = poles ? 2 + m * (l - 2) : m * l;
  if (static_cast<int>(points.size()) < unknowns) throw NumericalError("insufficient samples");

  const auto unknown = [&](int i, int j) {
    if (!poles) return i + j * m;
    if (j == 0) return 0;
    if (j == l - 1) return 1;
    return 2 + (j - 1) * m + i;
  };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(points.size() * 256);
  Eigen::MatrixX3d rhs = Eigen::MatrixX3d::Zero(unknowns, 3);
  std::array<std::pair<int, double>, 16> row{};
  for (std::size_t s = 0; s < points.size(); ++s) {
    int su = 0, sv = 0;
    std::array<double, 4> nu{}, du{}, nv{}, dv{};
    u.evaluate(params[s].x(), su, nu, du);
    v.evaluate(params[s].y(), sv, nv, dv);
    int used = 0;
    for (int b = 0; b <= kDegree; ++b) {
      for (int a = 0; a <= kDegree; ++a) {
        const double c = nu[a] * nv[b];
        if (c == 0.0) continue;
        const int x = unknown(u.control_index(su - kDegree + a), sv - kDegree + b);
        auto it = std::find_if(row.begin(), row.begin() + used, [&](const auto& e) { return e.first == x; });
        if (it != row.begin() + used) {
          it->second += c;
        } else {
          row[static_cast<std::size_t>(used++)] = {x, c};
        }
      }
    }
    for (int p = 0; p < used; ++p) {
      rhs.row(row[p].first) += row[p].second * points[s].transpose();
      for (int q = 0; q < used; ++q) triplets.emplace_back(row[p].first, row[q].first, row[p].second * row[q].second);
    }
  }

  Eigen::SparseMatrix<double> normal(unknowns, unknowns);
  normal.setFromTriplets(triplets.begin(), triplets.end());
  for (int x = 0; x < unknowns; ++x) {
    if (!(normal.coeff(x, x) > 0.0)) throw NumericalError("insufficient samples");
  }
  Eigen::SparseMatrix<double> regularized = normal;
  for (int x = 0; x < unknowns; ++x) regularized.coeffRef(x, x) += 1e-10;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(regularized);
  if (solver.info() != Eigen::Success) throw NumericalError("least-squares factorization failed");
  Eigen::MatrixX3d x = solver.solve(rhs);
  const Eigen::MatrixX3d residual = rhs - normal * x;
  x += solver.solve(residual);
  if (solver.info() != Eigen::Success || !x.allFinite()) throw NumericalError("least-squares solve failed");

  std::vector<Vec3> control(static_cast<std::size_t>(m) * static_cast<std::size_t>(l));
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i < m; ++i) control[static_cast<std::size_t>(i + j * m)] = x.row(unknown(i, j)).transpose();
  }
  return BSplineSurface(u, v, std::move(control), poles, orientation);
}

// ---------------------------------------------------------------------------
// Knot insertion

namespace {

struct Inserted {
  KnotVector knots;
  // New control entry q = α P[index_a] + (1 − α) P[index_b], per new index.
  std::vector<int> index_a, index_b;
  std::vector<double> alpha;
};

Inserted plan_insertion(const KnotVector& k, double t) {
  const int n = k.count();
  const int s = k.span(t);
  Inserted out{k, {}, {}, {}};
  out.index_a.assign(static_cast<std::size_t>(n + 1), 0);
  out.index_b.assign(static_cast<std::size_t>(n + 1), 0);
  out.alpha.assign(static_cast<std::size_t>(n + 1), 1.0);

  auto set = [&](int j, int a, int b, double alpha) {
    const std::size_t slot = static_cast<std::size_t>(k.is_periodic() ? ((j % (n + 1)) + (n + 1)) % (n + 1) : j);
    out.index_a[slot] = k.control_index(a);
    out.index_b[slot] = k.control_index(b);
    out.alpha[slot] = alpha;
  };
  // Boehm: blend the three functions whose support contains t, shift the rest.
  const int first = k.is_periodic() ? s - 2 : 0;
  const int last = k.is_periodic() ? s - 2 + n : n;
  for (int j = first; j <= last; ++j) {
    if (j <= s - 3) {
      set(j, j, j, 1.0);
    } else if (j <= s) {
      const double alpha = (t - k.knot(j)) / (k.knot(j + 3) - k.knot(j));
      set(j, j, j - 1, alpha);
    } else {
      set(j, j - 1, j - 1, 1.0);
    }
  }

  std::vector<double> raw = k.raw();
  if (k.is_periodic()) {
    raw.insert(raw.begin() + s + 1, t);
    out.knots = KnotVector::periodic(std::move(raw));
  } else {
    raw.insert(raw.begin() + s + 1, t);
    out.knots = KnotVector::clamped(std::move(raw));
  }
  return out;
}

}  // namespace

BSplineSurface refine(const BSplineSurface& surface, Direction direction, int interval_index) {
  const KnotVector& k = direction == Direction::u ? surface.knots_u() : surface.knots_v();
  const auto spans = k.intervals();
  if (interval_index < 0 || interval_index >= static_cast<int>(spans.size())) {
    throw InvalidArgument("refinement interval index out of range");
  }
  const auto [a, b] = spans[static_cast<std::size_t>(interval_index)];
  const Inserted plan = plan_insertion(k, 0.5 * (a + b));

  const int m = surface.count_u();
  const int l = surface.count_v();
  const int new_m = direction == Direction::u ? m + 1 : m;
  const int new_l = direction == Direction::v ? l + 1 : l;
  std::vector<Vec3> control(static_cast<std::size_t>(new_m) * static_cast<std::size_t>(new_l));
  for (int j = 0; j < new_l; ++j) {
    for (int i = 0; i < new_m; ++i) {
      const int line = direction == Direction::u ? i : j;
      const std::size_t slot = static_cast<std::size_t>(line);
      const double alpha = plan.alpha[slot];
      const Vec3 pa = direction == Direction::u ? surface.control(plan.index_a[slot], j)
                                                : surface.control(i, plan.index_a[slot]);
      const Vec3 pb = direction == Direction::u ? surface.control(plan.index_b[slot], j)
                                                : surface.control(i, plan.index_b[slot]);
      control[static_cast<std::size_t>(i + j * new_m)] = alpha == 1.0 ? pa : Vec3(alpha * pa + (1.0 - alpha) * pb);
    }
  }
  if (surface.has_poles() && direction == Direction::u) {
    // Blending identical points can round; keep the poles exactly collapsed.
    for (int i = 0; i < new_m; ++i) {
      control[static_cast<std::size_t>(i)] = surface.control(0, 0);
      control[static_cast<std::size_t>(i + (new_l - 1) * new_m)] = surface.control(0, l - 1);
    }
  }
  const KnotVector& new_u = direction == Direction::u ? plan.knots : surface.knots_u();
  const KnotVector& new_v = direction == Direction::v ? plan.knots : surface.knots_v();
  return BSplineSurface(new_u, new_v, std::move(control), surface.has_poles(), surface.orientation());
}

int div_count(int q, double alpha, int div_min) {
  return std::max(div_min, static_cast<int>(std::lround(alpha * (q - 1) + 1.0)));
}

// ---------------------------------------------------------------------------
// Meshing and closed-surface construction

TriangleMesh to_mesh(const BSplineSurface& surface, int u_n, int v_n) {
  if (u_n < 3 || v_n < 3) throw InvalidArgument("mesh resolution must be at least 3");
  const SampleGrid g = sample_grid(surface, u_n, v_n);
  TriangleMesh mesh;
  mesh.vertices = g.points;
  mesh.normals = g.normals;
  const bool wrap = surface.periodic_u();
  const auto id = [&](int i, int j) { return (wrap ? i % u_n : i) + j * u_n; };
  const int columns = wrap ? u_n : u_n - 1;
  for (int j = 0; j + 1 < v_n; ++j) {
    for (int i = 0; i < columns; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  if (surface.has_poles()) {
    const double v_lo = surface.knots_v().lo();
    const double v_hi = surface.knots_v().hi();
    const int bottom = static_cast<int>(mesh.vertices.size());
    const int top = bottom + 1;
    mesh.vertices.push_back(surface.evaluate(surface.knots_u().lo(), v_lo));
    mesh.vertices.push_back(surface.evaluate(surface.knots_u().lo(), v_hi));
    Vec3 n_bottom = Vec3::Zero();
    Vec3 n_top = Vec3::Zero();
    for (int i = 0; i < u_n; ++i) {
      n_bottom += g.normals[static_cast<std::size_t>(id(i, 0))];
      n_top += g.normals[static_cast<std::size_t>(id(i, v_n - 1))];
      mesh.triangles.push_back({bottom, id(i + 1, 0), id(i, 0)});
      mesh.triangles.push_back({id(i, v_n - 1), id(i + 1, v_n - 1), top});
    }
    mesh.normals.push_back(n_bottom.norm() > 0.0 ? Vec3(n_bottom.normalized()) : Vec3(Vec3::Zero()));
    mesh.normals.push_back(n_top.norm() > 0.0 ? Vec3(n_top.normalized()) : Vec3(Vec3::Zero()));
  }
  if (surface.orientation() < 0) {
    for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
  }
  return mesh;
}

Vec3 sphere_direction(double u, double v) {
  const double phi = 2.0 * std::numbers::pi * u;
  const double theta = std::numbers::pi * v;
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), -std::cos(theta)};
}

BSplineSurface fit_closed_surface(const std::function<Vec3(double, double)>& target, int count_u, int count_v,
                                  int samples_u, int samples_v) {
  const KnotVector ku = KnotVector::uniform_periodic(count_u);
  const KnotVector kv = KnotVector::uniform_clamped(count_v);
  std::vector<Vec2> params;
  std::vector<Vec3> points;
  for (int j = 0; j < samples_v; ++j) {
    for (int i = 0; i < samples_u; ++i) {
      const double u = static_cast<double>(i) / samples_u;
      const double v = static_cast<double>(j + 1) / (samples_v + 1);
      params.emplace_back(u, v);
      points.push_back(target(u, v));
    }
  }
  for (double v : {0.0, 1.0}) {
    params.emplace_back(0.0, v);
    points.push_back(target(0.0, v));
  }
  BSplineSurface fitted = fit_least_squares(params, points, ku, kv, true, 1);

  // Orient normals away from the control-grid centroid.
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& c : fitted.control()) centroid += c;
  centroid /= static_cast<double>(fitted.control().size());
  const SampleGrid g = sample_grid(fitted, std::max(samples_u, 3), std::max(samples_v, 3));
  double votes = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) votes += g.normals[s].dot(g.points[s] - centroid) > 0.0 ? 1.0 : -1.0;
  return votes >= 0.0 ? fitted : fitted.with_orientation(-1);
}

}  // namespace sepmem
