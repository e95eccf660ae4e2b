#include "sepmem/membrane.hpp"

#include "sepmem/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace sepmem {

void MembraneConfig::validate() const {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  for (int a = 0; a < 3; ++a) {
    if (!(search_extents[a] > 0.0) || !std::isfinite(search_extents[a])) {
      throw InvalidArgument("search extents must be positive");
    }
  }
  if (n_splits < 1) throw InvalidArgument("n_splits must be at least 1");
  weights.validate();
  if (weights.w.size() != attributes.size() + 1) throw InvalidArgument("weights must cover the point term and every attribute");
  if (!(g_min >= 0.0)) throw InvalidArgument("g_min must be non-negative");
  if (patience < 1) throw InvalidArgument("patience must be at least 1");
  if (init_grid[0] < 3 || init_grid[1] < 4) throw InvalidArgument("init grid must be at least 3 x 4");
  if (max_grid[0] < init_grid[0] || max_grid[1] < init_grid[1]) throw InvalidArgument("init grid exceeds max grid");
  if (refine_increment[0] < 0 || refine_increment[1] < 0) throw InvalidArgument("refine increments must be non-negative");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (div_min < 2) throw InvalidArgument("div_min must be at least 2");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw InvalidArgument("margin must be non-negative");
  if (search_reference_grid[0] < 1 || search_reference_grid[1] < 1) throw InvalidArgument("search reference grid must be positive");
  if (!(shrink_floor >= 0.0) || !std::isfinite(shrink_floor)) throw InvalidArgument("shrink_floor must be non-negative");
  if (!(refine_min_width >= 0.0 && refine_min_width <= 1.0)) throw InvalidArgument("refine_min_width must lie in [0, 1]");
  if (mesh_resolution[0] < 3 || mesh_resolution[1] < 3) throw InvalidArgument("mesh resolution must be at least 3");
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "iteration,eta_g,M,L,u_n,v_n,chamfer,seconds\n";
  for (const TraceRecord& r : trace) {
    out << r.iteration << ',' << r.eta_g << ',' << r.M << ',' << r.L << ',' << r.u_n << ',' << r.v_n << ','
        << r.chamfer << ',' << r.seconds << '\n';
  }
  out.precision(old_precision);
}

std::array<Vec3, 6> extreme_points(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("empty cloud");
  std::array<std::size_t, 6> best{};
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      if (cloud[i][a] > cloud[best[2 * a]][a]) best[2 * a] = i;
      if (cloud[i][a] < cloud[best[2 * a + 1]][a]) best[2 * a + 1] = i;
    }
  }
  std::array<Vec3, 6> out;
  for (int e = 0; e < 6; ++e) out[e] = cloud[best[e]];
  return out;
}

namespace {

constexpr std::array<int, 2> octagon_fit_grid{8, 5};

// Widest knot interval; ties go to the lowest index.
int widest_interval(const KnotVector& knots) {
  const auto spans = knots.intervals();
  int best = 0;
  for (std::size_t i = 1; i < spans.size(); ++i) {
    const double w = spans[i].second - spans[i].first;
    const double wb = spans[static_cast<std::size_t>(best)].second - spans[static_cast<std::size_t>(best)].first;
    if (w > wb * (1.0 + 1e-12)) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

BSplineSurface init_octagon(const PointCloud& cloud, double margin, std::array<int, 2> grid) {
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw InvalidArgument("margin must be non-negative");
  const auto ext = extreme_points(cloud);
  Vec3 lo, hi;
  for (int a = 0; a < 3; ++a) {
    hi[a] = ext[2 * a][a];
    lo[a] = ext[2 * a + 1][a];
  }
  const double diag = (hi - lo).norm();
  for (int a = 0; a < 3; ++a) {
    if (!(hi[a] - lo[a] > 1e-9 * diag)) throw NumericalError("degenerate initialization");
  }
  const Vec3 center = 0.5 * (lo + hi);
  const Vec3 half = 0.5 * (hi - lo) + Vec3::Constant(margin);

  // In coordinates scaled by `half` the shape is the unit cube cut by the planes
  // |x|+|y| = √2 and |x|+|y|+|z| = √3, all tangent to the unit sphere.
  const auto target = [&](double u, double v) -> Vec3 {
    const Vec3 d = sphere_direction(u, v);
    const Vec3 a = d.cwiseAbs();
    double support = a.maxCoeff();
    support = std::max(support, (a.x() + a.y()) / std::sqrt(2.0));
    support = std::max(support, (a.y() + a.z()) / std::sqrt(2.0));
    support = std::max(support, (a.x() + a.z()) / std::sqrt(2.0));
    support = std::max(support, a.sum() / std::sqrt(3.0));
    return center + half.cwiseProduct(d / support);
  };
  // Fitting the cut box directly on a fine grid reproduces its corners, which can
  // sit farther from the data than any search region reaches. A coarse fit
  // rounds them off; knot insertion then brings it to the requested grid.
  const int m = std::min(grid[0], octagon_fit_grid[0]);
  const int l = std::min(grid[1], octagon_fit_grid[1]);
  BSplineSurface surface = fit_closed_surface(target, m, l, std::max(4 * m, 16), std::max(4 * l, 16));
  while (surface.count_u() < grid[0]) surface = refine(surface, Direction::u, widest_interval(surface.knots_u()));
  while (surface.count_v() < grid[1]) surface = refine(surface, Direction::v, widest_interval(surface.knots_v()));
  return surface;
}

std::array<int, 2> sample_counts(const BSplineSurface& surface, const MembraneConfig& config) {
  return {div_count(surface.count_u(), config.alpha, config.div_min),
          div_count(surface.count_v(), config.alpha, config.div_min)};
}

namespace {

struct Sample {
  Vec2 param;
  Vec3 point;
  Vec3 normal;
  Vec3 tangent;
};

// Grid samples plus, for closed surfaces, the two poles.
std::vector<Sample> membrane_samples(const BSplineSurface& surface, int u_n, int v_n) {
  const SampleGrid g = sample_grid(surface, u_n, v_n);
  std::vector<Sample> out;
  out.reserve(g.size() + 2);
  for (std::size_t s = 0; s < g.size(); ++s) {
    const auto d = surface.derivatives(g.params[s].x(), g.params[s].y());
    out.push_back({g.params[s], g.points[s], g.normals[s], d.du});
  }
  if (surface.has_poles()) {
    const double u0 = surface.knots_u().lo();
    for (int end = 0; end < 2; ++end) {
      const int row = end == 0 ? 0 : v_n - 1;
      const double v = end == 0 ? surface.knots_v().lo() : surface.knots_v().hi();
      Vec3 n = Vec3::Zero();
      for (int i = 0; i < u_n; ++i) n += g.normals[static_cast<std::size_t>(i + row * u_n)];
      if (!(n.norm() > 0.0)) continue;
      out.push_back({Vec2(u0, v), surface.evaluate(u0, v), n.normalized(), Vec3::Zero()});
    }
  }
  return out;
}

std::array<Vec3, 3> sample_frame(const Sample& s) {
  const Vec3 t = s.tangent - s.tangent.dot(s.normal) * s.normal;
  if (t.norm() > 1e-9 * std::max(1.0, s.tangent.norm())) {
    const Vec3 t1 = t.normalized();
    return {s.normal, t1, s.normal.cross(t1)};
  }
  return orthonormal_frame(s.normal);
}

double sample_diagonal(const std::vector<Sample>& samples) {
  BoundingBox box{samples.front().point, samples.front().point};
  for (const Sample& s : samples) {
    box.min = box.min.cwiseMin(s.point);
    box.max = box.max.cwiseMax(s.point);
  }
  return box.diagonal();
}

std::size_t interval_of(const std::vector<std::pair<double, double>>& spans, double t) {
  const auto it = std::upper_bound(spans.begin(), spans.end(), t,
                                   [](double value, const auto& span) { return value < span.first; });
  if (it == spans.begin()) return 0;
  return static_cast<std::size_t>(it - spans.begin()) - 1;
}

// Interval with the lowest mean η* among those holding samples and at least
// `min_width` × the widest interval; ties go to the lowest index.
std::optional<int> weakest_interval(const KnotVector& knots, const std::vector<double>& params,
                                    const std::vector<double>& etas, double min_width) {
  const auto spans = knots.intervals();
  std::vector<double> sum(spans.size(), 0.0);
  std::vector<int> count(spans.size(), 0);
  for (std::size_t s = 0; s < params.size(); ++s) {
    const std::size_t i = interval_of(spans, knots.normalize(params[s]));
    sum[i] += etas[s];
    ++count[i];
  }
  double widest = 0.0;
  for (const auto& [a, b] : spans) widest = std::max(widest, b - a);
  std::optional<int> best;
  double best_mean = 0.0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (count[i] == 0 || spans[i].second - spans[i].first < min_width * widest) continue;
    const double mean = sum[i] / count[i];
    if (!best || mean < best_mean) {
      best = static_cast<int>(i);
      best_mean = mean;
    }
  }
  return best;
}

}  // namespace

void iterate(MembraneState& state, const SeparabilityContext& ctx, const MembraneConfig& config) {
  const BSplineSurface& surface = state.surface;
  const auto [u_n, v_n] = sample_counts(surface, config);
  const auto samples = membrane_samples(surface, u_n, v_n);

  const double scale = config.search_scale == SearchScale::cloud ? ctx.cloud().bounds().diagonal()
                                                                  : sample_diagonal(samples);
  Vec3 extents = config.search_extents * scale;
  if (config.shrink_search) {
    const double floor = config.shrink_floor * ctx.global_spacing();
    const std::array<int, 2> counts{surface.count_u(), surface.count_v()};
    for (int d = 0; d < 2; ++d) {
      const double ratio = std::min(1.0, static_cast<double>(config.search_reference_grid[d]) / counts[d]);
      extents[d + 1] = std::max(extents[d + 1] * ratio, std::min(floor, extents[d + 1]));
    }
  }

  std::vector<Vec2> params(samples.size());
  std::vector<Vec3> targets(samples.size());
  std::vector<double> etas(samples.size());
  double eta_sum = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Sample& smp = samples[s];
    Cuboid search;
    search.center = smp.point;
    search.axes = sample_frame(smp);
    search.extents = extents;
    const SplitResult r = max_split_separability(ctx, search, config.n_splits);
    params[s] = smp.param;
    targets[s] = smp.point + config.beta * r.split_offset * smp.normal;
    etas[s] = r.eta_star;
    eta_sum += r.eta_star;
  }

  BSplineSurface next = fit_least_squares(params, targets, surface.knots_u(), surface.knots_v(), surface.has_poles(),
                                          surface.orientation());
  state.surface = std::move(next);
  state.sample_params = std::move(params);
  state.sample_eta = std::move(etas);
  state.eta_history.push_back(samples.empty() ? 0.0 : eta_sum / static_cast<double>(samples.size()));
  ++state.iteration;
}

bool adjust(MembraneState& state, const MembraneConfig& config) {
  if (state.eta_history.empty()) return false;
  const std::size_t n = state.eta_history.size();
  const double previous = n > 1 ? state.eta_history[n - 2] : 0.0;
  // η_g falls while a centered cuboid closes in on a thin surface, so only a
  // settled η_g (in either direction) counts as stagnation.
  const double change = std::abs(state.eta_history[n - 1] - previous);
  if (change >= config.g_min) {
    state.stagnation = 0;
    return false;
  }

  std::vector<double> us, vs;
  for (const Vec2& p : state.sample_params) {
    us.push_back(p.x());
    vs.push_back(p.y());
  }
  bool refined = false;
  for (int r = 0; r < config.refine_increment[0] && state.surface.count_u() < config.max_grid[0]; ++r) {
    const auto i = weakest_interval(state.surface.knots_u(), us, state.sample_eta, config.refine_min_width);
    if (!i) break;
    state.surface = refine(state.surface, Direction::u, *i);
    refined = true;
  }
  for (int r = 0; r < config.refine_increment[1] && state.surface.count_v() < config.max_grid[1]; ++r) {
    const auto i = weakest_interval(state.surface.knots_v(), vs, state.sample_eta, config.refine_min_width);
    if (!i) break;
    state.surface = refine(state.surface, Direction::v, *i);
    refined = true;
  }
  state.stagnation = refined ? 0 : state.stagnation + 1;
  return refined;
}

bool should_stop(const MembraneState& state, const MembraneConfig& config) {
  return state.stagnation >= config.patience || state.iteration >= config.max_iterations;
}

Reconstruction reconstruct(const PointCloud& cloud, const MembraneConfig& config) {
  config.validate();
  if (cloud.size() < 7) throw InvalidArgument("reconstruction needs at least 7 points");

  SeparabilitySettings settings;
  settings.k = config.k;
  settings.density_mode = config.density_mode;
  settings.weights = config.weights;
  settings.attributes = config.attributes;
  const SeparabilityContext ctx(cloud, settings);

  const double diag = cloud.bounds().diagonal();
  MembraneState state(init_octagon(cloud, config.margin * diag, config.init_grid));
  RunTrace trace;
  const auto& [mesh_u, mesh_v] = config.mesh_resolution;
  while (true) {
    const auto start = std::chrono::steady_clock::now();
    const auto [u_n, v_n] = sample_counts(state.surface, config);
    TraceRecord rec;
    rec.M = state.surface.count_u();
    rec.L = state.surface.count_v();
    rec.u_n = u_n;
    rec.v_n = v_n;
    iterate(state, ctx, config);
    adjust(state, config);
    const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.iteration = state.iteration;
    rec.eta_g = state.eta_history.back();
    rec.chamfer = config.trace_chamfer ? chamfer(to_mesh(state.surface, mesh_u, mesh_v).vertices, cloud.positions())
                                       : std::numeric_limits<double>::quiet_NaN();
    rec.seconds = config.deterministic ? 0.0 : seconds;
    trace.push_back(rec);
    if (should_stop(state, config)) break;
  }
  TriangleMesh mesh = to_mesh(state.surface, mesh_u, mesh_v);
  return {std::move(state.surface), std::move(mesh), std::move(trace)};
}

}  // namespace sepmem
