#pragma once

// Brute-force oracles and random inputs shared by the unit tests.

#include "sepmem/common.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace testing {

using sepmem::Vec3;

inline std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec3> out(n);
  for (auto& p : out) p = Vec3(u(rng), u(rng), u(rng));
  return out;
}

inline sepmem::Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// (distance, index) pairs of the k nearest points, sorted with the index as tie-break.
inline std::vector<std::pair<double, std::uint32_t>> brute_knn(std::span<const Vec3> pts, const Vec3& q,
                                                               std::size_t k) {
  std::vector<std::pair<double, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < pts.size(); ++i) all.emplace_back((pts[i] - q).norm(), i);
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  return all;
}

/// Mean k-nearest distance by sorting every other point by distance.
inline double brute_mean_knn(std::span<const Vec3> pts, std::size_t id, std::size_t k) {
  std::vector<double> d;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j != id) d.push_back((pts[j] - pts[id]).norm());
  }
  std::sort(d.begin(), d.end());
  double s = 0.0;
  for (std::size_t j = 0; j < k; ++j) s += d[j];
  return s / static_cast<double>(k);
}

/// Fisher ratio straight from the definition, with σ_T² = 0 ⇒ 0.
inline double fisher_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double sa = 0.0, sb = 0.0;
  for (double v : a) sa += v;
  for (double v : b) sb += v;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = sa / na, mb = sb / nb, mt = (sa + sb) / (na + nb);
  double total = 0.0;
  for (double v : a) total += (v - mt) * (v - mt);
  for (double v : b) total += (v - mt) * (v - mt);
  if (total == 0.0) return 0.0;
  return (na * (ma - mt) * (ma - mt) + nb * (mb - mt) * (mb - mt)) / total;
}

/// Occupancy sequence: o ones followed by b zeros.
inline std::vector<double> binary_region(std::int64_t o, std::int64_t b) {
  std::vector<double> v(static_cast<std::size_t>(o), 1.0);
  v.resize(static_cast<std::size_t>(o + b), 0.0);
  return v;
}

}  // namespace testing
