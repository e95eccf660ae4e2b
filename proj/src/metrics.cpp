#include "sepmem/metrics.hpp"

#include "sepmem/geometry.hpp"
#include "sepmem/kdtree.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace sepmem {

namespace {

void require_points(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("empty point set");
}

double mean_nearest(std::span<const Vec3> from, const KdTree& to) {
  double sum = 0.0;
  for (const Vec3& p : from) sum += to.nearest(p).distance;
  return sum / static_cast<double>(from.size());
}

double within_fraction(std::span<const Vec3> from, const KdTree& to, double tau) {
  std::size_t hit = 0;
  for (const Vec3& p : from) {
    if (to.nearest(p).distance <= tau) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(from.size());
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double directed_consistency(const SurfaceSamples& from, const SurfaceSamples& to, const KdTree& to_index) {
  double sum = 0.0;
  for (std::size_t i = 0; i < from.points.size(); ++i) {
    const Neighbor nn = to_index.nearest(from.points[i]);
    sum += std::min(1.0, std::abs(from.normals[i].dot(to.normals[nn.index])));
  }
  return sum / static_cast<double>(from.points.size());
}

void require_unit_normals(const SurfaceSamples& s) {
  if (s.normals.size() != s.points.size()) throw InvalidArgument("every sample needs a normal");
  for (const Vec3& n : s.normals) {
    if (!(std::abs(n.norm() - 1.0) <= 1e-6)) throw InvalidArgument("normals must be unit length");
  }
}

}  // namespace

SurfaceSamples sample_mesh(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample count must be positive");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    total += triangle_area(mesh, f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw InvalidArgument("mesh has zero area");

  std::mt19937_64 rng(seed);
  SurfaceSamples out;
  out.points.reserve(n);
  out.normals.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = unit_uniform(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const std::size_t f = static_cast<std::size_t>(it - cumulative.begin());
    const auto& t = mesh.triangles[f];
    double r1 = unit_uniform(rng);
    double r2 = unit_uniform(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(t[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(t[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(t[2])];
    out.points.push_back(a + r1 * (b - a) + r2 * (c - a));
    out.normals.push_back(face_normal(mesh, f));
  }
  return out;
}

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  require_points(a, b);
  const KdTree ia(a);
  const KdTree ib(b);
  return 0.5 * mean_nearest(a, ib) + 0.5 * mean_nearest(b, ia);
}

FScore fscore(std::span<const Vec3> a, std::span<const Vec3> b, double tau) {
  require_points(a, b);
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  const KdTree ia(a);
  const KdTree ib(b);
  FScore out;
  out.precision = within_fraction(a, ib, tau);
  out.recall = within_fraction(b, ia, tau);
  const double pr = out.precision + out.recall;
  out.f = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

double normal_consistency(const SurfaceSamples& a, const SurfaceSamples& b) {
  require_points(a.points, b.points);
  require_unit_normals(a);
  require_unit_normals(b);
  const KdTree ia(a.points);
  const KdTree ib(b.points);
  return 0.5 * directed_consistency(a, b, ib) + 0.5 * directed_consistency(b, a, ia);
}

std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t k) {
  if (points.empty()) throw InvalidArgument("empty point set");
  const KdTree index(points);
  std::vector<Vec3> normals(points.size(), Vec3::UnitZ());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nbrs = index.knn(points[i], std::max<std::size_t>(k, 3));
    if (nbrs.size() < 3) continue;
    Vec3 mean = Vec3::Zero();
    for (const Neighbor& n : nbrs) mean += points[n.index];
    mean /= static_cast<double>(nbrs.size());
    Mat3 cov = Mat3::Zero();
    for (const Neighbor& n : nbrs) {
      const Vec3 d = points[n.index] - mean;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 v = eig.eigenvectors().col(0);
    if (v.allFinite() && v.norm() > 0.0) normals[i] = v.normalized();
  }
  return normals;
}

MetricsReport evaluate(const SurfaceSamples& pred, const SurfaceSamples& gt, double tau_fraction) {
  require_points(pred.points, gt.points);
  if (!(tau_fraction > 0.0)) throw InvalidArgument("tau fraction must be positive");
  SurfaceSamples p = pred;
  SurfaceSamples g = gt;
  if (p.normals.size() != p.points.size()) p.normals = estimate_normals(p.points);
  if (g.normals.size() != g.points.size()) g.normals = estimate_normals(g.points);

  MetricsReport r;
  r.threshold = tau_fraction * bounding_box(g.points).diagonal();
  r.chamfer = chamfer(p.points, g.points);
  const FScore f = r.threshold > 0.0 ? fscore(p.points, g.points, r.threshold) : FScore{};
  r.fscore = f.f;
  r.precision = f.precision;
  r.recall = f.recall;
  r.normal_consistency = normal_consistency(p, g);
  return r;
}

}  // namespace sepmem
