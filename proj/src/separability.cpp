#include "sepmem/separability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sepmem {

namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// True when σ_T² is indistinguishable from rounding noise on values of this magnitude.
bool negligible_variance(double total_var, double count, double scale) {
  const double floor = 1e-12 * scale;
  return total_var <= count * floor * floor;
}

}  // namespace

void SeparabilityWeights::validate() const {
  if (w.empty()) throw InvalidArgument("weights must not be empty");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("weights must be finite and non-negative");
    sum += v;
  }
  if (!(sum > 0.0)) throw InvalidArgument("weights must not all be zero");
}

double attribute_separability(std::span<const double> values1, std::span<const double> values2) {
  if (values1.empty() || values2.empty()) throw InvalidArgument("empty region");
  const double n1 = static_cast<double>(values1.size());
  const double n2 = static_cast<double>(values2.size());
  const double s1 = std::accumulate(values1.begin(), values1.end(), 0.0);
  const double s2 = std::accumulate(values2.begin(), values2.end(), 0.0);
  const double m1 = s1 / n1;
  const double m2 = s2 / n2;
  const double mt = (s1 + s2) / (n1 + n2);

  double total = 0.0;
  double scale = 0.0;
  for (auto values : {values1, values2}) {
    for (double v : values) {
      total += (v - mt) * (v - mt);
      scale = std::max(scale, std::abs(v));
    }
  }
  if (negligible_variance(total, n1 + n2, scale)) return 0.0;
  const double between = n1 * (m1 - mt) * (m1 - mt) + n2 * (m2 - mt) * (m2 - mt);
  return clamp_unit(between / total);
}

std::int64_t nondata_count(double region_volume, double delta, std::int64_t o) {
  if (!(region_volume > 0.0)) throw InvalidArgument("region volume must be positive");
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (o < 0) throw InvalidArgument("negative point count");
  const double cells = std::floor(region_volume / (delta * delta * delta));
  const double b = cells - static_cast<double>(o);
  return b > 0.0 ? static_cast<std::int64_t>(b) : 0;
}

double point_separability(const RegionCounts& r1, const RegionCounts& r2) {
  if (r1.o < 0 || r1.b < 0 || r2.o < 0 || r2.b < 0) throw InvalidArgument("negative region count");
  if (r1.n() == 0 || r2.n() == 0) throw InvalidArgument("empty region");
  const double n1 = static_cast<double>(r1.n());
  const double n2 = static_cast<double>(r2.n());
  const double total = n1 + n2;
  const double occupied = static_cast<double>(r1.o + r2.o);
  if (occupied == 0.0 || occupied == total) return 0.0;
  const double mu1 = static_cast<double>(r1.o) / n1;
  const double mu2 = static_cast<double>(r2.o) / n2;
  const double mut = occupied / total;
  const double between = n1 * (mu1 - mut) * (mu1 - mut) + n2 * (mu2 - mut) * (mu2 - mut);
  return clamp_unit(between / (total * mut * (1.0 - mut)));
}

double weighted_separability(std::span<const double> eta, const SeparabilityWeights& weights) {
  weights.validate();
  if (eta.size() != weights.w.size()) throw InvalidArgument("separability vector and weights differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    num += weights.w[j] * eta[j];
    den += weights.w[j];
  }
  return num / den;
}

SeparabilityContext::SeparabilityContext(const PointCloud& cloud, SeparabilitySettings settings)
    : cloud_(&cloud), settings_(std::move(settings)) {
  settings_.weights.validate();
  if (settings_.weights.w.size() != settings_.attributes.size() + 1) {
    throw InvalidArgument("weights must have one entry for points plus one per attribute");
  }
  if (settings_.k < 1) throw InvalidArgument("k must be at least 1");
  if (cloud.size() < settings_.k + 1) throw InvalidArgument("k too large");
  for (const auto& name : settings_.attributes) channels_.push_back(&cloud.attribute(name));
  spacing_ = knn_spacing(cloud, settings_.k);
  global_spacing_ = std::accumulate(spacing_.begin(), spacing_.end(), 0.0) / static_cast<double>(spacing_.size());
}

double SeparabilityContext::spacing_for(std::span<const std::uint32_t> members) const {
  if (settings_.density_mode == DensityMode::global || members.empty()) return global_spacing_;
  double sum = 0.0;
  for (std::uint32_t id : members) sum += spacing_[id];
  return sum / static_cast<double>(members.size());
}

PairSeparability region_pair_separability(const SeparabilityContext& ctx, const Cuboid& cuboid1,
                                          const Cuboid& cuboid2) {
  const auto q1 = points_in_cuboid(ctx.cloud(), cuboid1);
  const auto q2 = points_in_cuboid(ctx.cloud(), cuboid2);
  std::vector<std::uint32_t> ids2;
  std::set_difference(q2.ids.begin(), q2.ids.end(), q1.ids.begin(), q1.ids.end(), std::back_inserter(ids2));

  PairSeparability out;
  out.eta.assign(ctx.channel_count() + 1, 0.0);
  std::vector<std::uint32_t> merged;
  std::merge(q1.ids.begin(), q1.ids.end(), ids2.begin(), ids2.end(), std::back_inserter(merged));
  if (merged.empty()) {
    out.flagged = true;
    return out;
  }

  const double delta = ctx.spacing_for(merged);
  RegionCounts c1{static_cast<std::int64_t>(q1.ids.size()), 0};
  RegionCounts c2{static_cast<std::int64_t>(ids2.size()), 0};
  c1.b = nondata_count(cuboid1.volume(), delta, c1.o);
  c2.b = nondata_count(cuboid2.volume(), delta, c2.o);
  if (c1.n() == 0 || c2.n() == 0) {
    out.flagged = true;
    return out;
  }
  out.eta[0] = point_separability(c1, c2);

  for (std::size_t a = 0; a < ctx.channel_count(); ++a) {
    if (q1.ids.empty() || ids2.empty()) continue;
    const auto channel = ctx.channel(a);
    std::vector<double> v1, v2;
    v1.reserve(q1.ids.size());
    v2.reserve(ids2.size());
    for (auto id : q1.ids) v1.push_back(channel[id]);
    for (auto id : ids2) v2.push_back(channel[id]);
    out.eta[a + 1] = attribute_separability(v1, v2);
  }
  out.eta_w = weighted_separability(out.eta, ctx.settings().weights);
  return out;
}

std::vector<double> split_offsets(double depth, int n_splits) {
  if (n_splits < 2) throw InvalidArgument("n_splits must be at least 2");
  if (!(depth > 0.0)) throw InvalidArgument("search depth must be positive");
  std::vector<double> out(static_cast<std::size_t>(n_splits));
  const double step = depth / (n_splits + 1);
  for (int k = 0; k < n_splits; ++k) out[static_cast<std::size_t>(k)] = -0.5 * depth + (k + 1) * step;
  return out;
}

SplitResult max_split_separability(const SeparabilityContext& ctx, const Cuboid& search, int n_splits) {
  const auto offsets = split_offsets(search.extents[0], n_splits);
  const auto members = points_in_cuboid(ctx.cloud(), search);
  const std::size_t channels = ctx.channel_count();

  SplitResult result;
  result.per_attribute.assign(channels + 1, 0.0);
  if (members.ids.empty()) {
    result.flagged = true;
    return result;
  }

  const double delta = ctx.spacing_for(members.ids);
  const double half = 0.5 * search.extents[0];
  const double area = search.extents[1] * search.extents[2];
  const std::size_t total = members.ids.size();

  // Members ordered by depth; the first `o1` of them form region 1 at each split.
  std::vector<std::pair<double, std::uint32_t>> by_depth;
  by_depth.reserve(total);
  for (auto id : members.ids) by_depth.emplace_back(search.depth_of(ctx.cloud()[id]), id);
  std::sort(by_depth.begin(), by_depth.end());

  // Per channel: centered prefix sums Σ(v − m_T) and the total variance.
  std::vector<std::vector<double>> prefix(channels);
  std::vector<double> total_var(channels, 0.0);
  std::vector<bool> constant(channels, false);
  for (std::size_t a = 0; a < channels; ++a) {
    const auto channel = ctx.channel(a);
    double sum = 0.0;
    double scale = 0.0;
    for (const auto& [d, id] : by_depth) {
      sum += channel[id];
      scale = std::max(scale, std::abs(channel[id]));
    }
    const double mean = sum / static_cast<double>(total);
    auto& p = prefix[a];
    p.assign(total + 1, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
      const double c = channel[by_depth[i].second] - mean;
      p[i + 1] = p[i] + c;
      total_var[a] += c * c;
    }
    constant[a] = negligible_variance(total_var[a], static_cast<double>(total), scale);
  }

  std::vector<double> eta(channels + 1);
  bool found = false;
  double best_eta = 0.0;
  double best_offset = 0.0;
  for (double t : offsets) {
    const auto split = std::upper_bound(by_depth.begin(), by_depth.end(), t,
                                        [](double value, const auto& e) { return value < e.first; });
    const auto o1 = static_cast<std::size_t>(split - by_depth.begin());
    const std::size_t o2 = total - o1;
    RegionCounts c1{static_cast<std::int64_t>(o1), 0};
    RegionCounts c2{static_cast<std::int64_t>(o2), 0};
    c1.b = nondata_count(area * (t + half), delta, c1.o);
    c2.b = nondata_count(area * (half - t), delta, c2.o);
    if (c1.n() == 0 || c2.n() == 0) continue;

    eta[0] = point_separability(c1, c2);
    for (std::size_t a = 0; a < channels; ++a) {
      eta[a + 1] = 0.0;
      if (o1 == 0 || o2 == 0 || constant[a]) continue;
      const double s1 = prefix[a][o1];
      const double s2 = prefix[a][total] - s1;
      const double between = s1 * s1 / static_cast<double>(o1) + s2 * s2 / static_cast<double>(o2);
      eta[a + 1] = std::clamp(between / total_var[a], 0.0, 1.0);
    }
    const double value = weighted_separability(eta, ctx.settings().weights);

    bool better = !found || value > best_eta + 1e-12;
    if (found && !better && std::abs(value - best_eta) <= 1e-12) {
      better = std::abs(t) < std::abs(best_offset) ||
               (std::abs(t) == std::abs(best_offset) && t < best_offset);
    }
    if (better) {
      found = true;
      best_eta = value;
      best_offset = t;
      result.per_attribute = eta;
    }
  }

  if (!found) {
    result.flagged = true;
    return result;
  }
  result.eta_star = best_eta;
  result.split_offset = best_eta > 0.0 ? best_offset : 0.0;
  return result;
}

std::size_t GridSpec::size() const {
  return static_cast<std::size_t>(counts[0]) * static_cast<std::size_t>(counts[1]) *
         static_cast<std::size_t>(counts[2]);
}

std::vector<Vec3> GridSpec::points() const {
  for (int c : counts) {
    if (c < 1) throw InvalidArgument("grid counts must be positive");
  }
  std::vector<Vec3> out;
  out.reserve(size());
  for (int k = 0; k < counts[2]; ++k) {
    for (int j = 0; j < counts[1]; ++j) {
      for (int i = 0; i < counts[0]; ++i) {
        out.push_back(origin + Vec3(i * step.x(), j * step.y(), k * step.z()));
      }
    }
  }
  return out;
}

std::vector<double> separability_map(const SeparabilityContext& ctx, const GridSpec& grid, const Vec3& direction,
                                     const Vec3& window_dims) {
  const auto frame = orthonormal_frame(direction);
  const double d = window_dims[0];
  std::vector<double> out;
  out.reserve(grid.size());
  for (const Vec3& p : grid.points()) {
    Cuboid inner;
    inner.axes = frame;
    inner.extents = window_dims;
    inner.center = p - 0.5 * d * frame[0];
    Cuboid outer = inner;
    outer.center = p + 0.5 * d * frame[0];
    out.push_back(region_pair_separability(ctx, inner, outer).eta_w);
  }
  return out;
}

}  // namespace sepmem
