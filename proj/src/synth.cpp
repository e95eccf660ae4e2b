#include "sepmem/synth.hpp"

#include "sepmem/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

namespace sepmem {

namespace {

Vec3 gaussian_vec(std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double x = g(rng);
  const double y = g(rng);
  const double z = g(rng);
  return sigma * Vec3(x, y, z);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Indices of round(ratio·n) points; each input point at most once per full pass.
std::vector<std::size_t> pick_sources(std::size_t n, double ratio, std::mt19937_64& rng) {
  const auto count = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  std::vector<std::size_t> out;
  out.reserve(count);
  std::vector<std::size_t> pool(n);
  while (out.size() < count) {
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    const std::size_t take = std::min(n, count - out.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  }
  return out;
}

// Appends injected points, giving them dark intensity or zero attributes.
PointCloud append_points(const PointCloud& cloud, const std::vector<Vec3>& extra, std::mt19937_64& rng) {
  std::vector<Vec3> positions = cloud.positions();
  positions.insert(positions.end(), extra.begin(), extra.end());
  std::map<std::string, std::vector<double>> attributes = cloud.attributes();
  for (auto& [name, values] : attributes) {
    for (std::size_t i = 0; i < extra.size(); ++i) {
      values.push_back(name == "intensity" ? uniform(rng, 0.0, 0.2) : 0.0);
    }
  }
  return PointCloud(std::move(positions), std::move(attributes));
}

void require_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be non-negative");
}

}  // namespace

PointCloud gen_sphere(std::size_t n, double radius, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("point count must be positive");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Vec3> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    const Vec3 g = gaussian_vec(rng, 1.0);
    const double len = g.norm();
    if (len < 1e-12) continue;
    pts.push_back(radius * (g / len));
  }
  return PointCloud(std::move(pts));
}

namespace {

double bumpy_radius(const Vec3& d) {
  const Vec3 axes(1.0, 0.75, 0.6);
  const double r = 1.0 / d.cwiseQuotient(axes).norm();
  const std::array<Vec3, 2> lobes{Vec3(0.0, 1.0, 0.0), Vec3(-0.6, 0.0, 0.8)};
  double bump = 0.0;
  for (const Vec3& c : lobes) {
    const double angle = std::acos(std::clamp(d.dot(c), -1.0, 1.0));
    bump += 0.35 * std::exp(-angle * angle / (2.0 * 0.3 * 0.3));
  }
  return r + bump;
}

}  // namespace

TriangleMesh bumpy_ellipsoid_mesh(int rings) {
  if (rings < 2) throw InvalidArgument("need at least 2 rings");
  const int sectors = 2 * rings;
  TriangleMesh mesh;
  auto vertex = [&](double theta, double phi) {
    const Vec3 d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    mesh.vertices.push_back(bumpy_radius(d) * d);
  };
  vertex(0.0, 0.0);
  for (int j = 1; j < rings; ++j) {
    for (int i = 0; i < sectors; ++i) {
      vertex(std::numbers::pi * j / rings, 2.0 * std::numbers::pi * i / sectors);
    }
  }
  vertex(std::numbers::pi, 0.0);
  const int south = static_cast<int>(mesh.vertices.size()) - 1;
  auto ring = [&](int j, int i) { return 1 + (j - 1) * sectors + (i % sectors); };
  for (int i = 0; i < sectors; ++i) {
    mesh.triangles.push_back({0, ring(1, i), ring(1, i + 1)});
    for (int j = 1; j + 1 < rings; ++j) {
      mesh.triangles.push_back({ring(j, i), ring(j + 1, i), ring(j + 1, i + 1)});
      mesh.triangles.push_back({ring(j, i), ring(j + 1, i + 1), ring(j, i + 1)});
    }
    mesh.triangles.push_back({ring(rings - 1, i), south, ring(rings - 1, i + 1)});
  }
  return mesh;
}

PointCloud gen_bumpy_ellipsoid(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("point count must be positive");
  return PointCloud(sample_mesh(bumpy_ellipsoid_mesh(), n, seed).points);
}

PointCloud paint_intensity(const PointCloud& cloud, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> values(cloud.size());
  for (double& v : values) v = uniform(rng, lo, hi);
  PointCloud out = cloud;
  out.set_attribute("intensity", std::move(values));
  return out;
}

PointCloud add_duplicated_outliers(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  require_sigma(sigma);
  if (cloud.empty()) return cloud;
  const double s = sigma * cloud.bounds().diagonal();
  std::mt19937_64 rng(seed);
  std::vector<Vec3> extra;
  extra.reserve(cloud.size());
  for (const Vec3& p : cloud.positions()) extra.push_back(p + gaussian_vec(rng, s));
  return append_points(cloud, extra, rng);
}

PointCloud gen_colored_plane(const PlaneSpec& spec, std::uint64_t seed) {
  if (spec.regions.empty()) throw InvalidArgument("plane needs at least one region");
  if (!(spec.height > 0.0)) throw InvalidArgument("plane height must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Vec3> pts;
  std::vector<double> intensity;
  double coarsest = 0.0;
  for (const PlaneRegion& r : spec.regions) {
    if (!(r.x1 > r.x0) || !(r.spacing > 0.0)) throw InvalidArgument("invalid plane region");
    coarsest = std::max(coarsest, r.spacing);
    const auto nx = static_cast<long>(std::ceil((r.x1 - r.x0) / r.spacing - 1e-9));
    const auto ny = static_cast<long>(std::ceil(spec.height / r.spacing - 1e-9));
    for (long j = 0; j < ny; ++j) {
      for (long i = 0; i < nx; ++i) {
        const double jx = spec.jitter * r.spacing * uniform(rng, -0.5, 0.5);
        const double jy = spec.jitter * r.spacing * uniform(rng, -0.5, 0.5);
        const double x = std::clamp(r.x0 + (static_cast<double>(i) + 0.5) * r.spacing + jx, r.x0, r.x1);
        const double y = std::clamp((static_cast<double>(j) + 0.5) * r.spacing + jy, 0.0, spec.height);
        pts.emplace_back(x, y, 0.0);
        intensity.push_back(r.intensity);
      }
    }
  }
  PointCloud cloud(std::move(pts), {{"intensity", std::move(intensity)}});
  cloud.set_attribute("density", neighbor_count_density(cloud, 3.0 * coarsest));
  return cloud;
}

CorruptionSpec parse_corruption(const std::string& text) {
  CorruptionSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "gaussian_noise") {
    spec.kind = CorruptionKind::gaussian_noise;
  } else if (kind == "duplicated_outliers") {
    spec.kind = CorruptionKind::duplicated_outliers;
  } else if (kind == "region_outliers") {
    spec.kind = CorruptionKind::region_outliers;
    spec.sigma = 0.05;
    spec.ratio = 0.1;
  } else if (kind == "surface_outliers") {
    spec.kind = CorruptionKind::surface_outliers;
    spec.sigma = 0.05;
    spec.ratio = 0.1;
  } else {
    throw InvalidArgument("unknown corruption kind '" + kind + "'");
  }
  if (colon == std::string::npos) return spec;

  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const std::size_t end = std::min(rest.find(',', pos), rest.size());
    const std::string item = rest.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("corruption parameter '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    const char* first = value.data();
    const char* last = value.data() + value.size();
    std::from_chars_result res{};
    if (key == "sigma") {
      res = std::from_chars(first, last, spec.sigma);
    } else if (key == "ratio") {
      res = std::from_chars(first, last, spec.ratio);
    } else if (key == "seed") {
      res = std::from_chars(first, last, spec.seed);
    } else {
      throw InvalidArgument("unknown corruption parameter '" + key + "'");
    }
    if (res.ec != std::errc() || res.ptr != last) throw InvalidArgument("bad value for corruption parameter '" + key + "'");
  }
  require_sigma(spec.sigma);
  if (!(spec.ratio >= 0.0) || !std::isfinite(spec.ratio)) throw InvalidArgument("ratio must be non-negative");
  return spec;
}

PointCloud corrupt(const PointCloud& cloud, const CorruptionSpec& spec) {
  require_sigma(spec.sigma);
  if (!(spec.ratio >= 0.0) || !std::isfinite(spec.ratio)) throw InvalidArgument("ratio must be non-negative");
  if (cloud.empty()) return cloud;
  const BoundingBox box = cloud.bounds();
  const double diag = box.diagonal();
  const double s = spec.sigma * diag;
  std::mt19937_64 rng(spec.seed);

  switch (spec.kind) {
    case CorruptionKind::gaussian_noise: {
      if (spec.sigma == 0.0) return cloud;
      std::vector<Vec3> pts = cloud.positions();
      for (Vec3& p : pts) p += gaussian_vec(rng, s);
      return PointCloud(std::move(pts), cloud.attributes());
    }
    case CorruptionKind::duplicated_outliers: {
      std::vector<Vec3> extra;
      for (std::size_t i : pick_sources(cloud.size(), spec.ratio, rng)) extra.push_back(cloud[i] + gaussian_vec(rng, s));
      return append_points(cloud, extra, rng);
    }
    case CorruptionKind::region_outliers: {
      const auto count = static_cast<std::size_t>(std::llround(spec.ratio * static_cast<double>(cloud.size())));
      constexpr int kBlobs = 4;
      std::array<Vec3, kBlobs> centers;
      for (Vec3& c : centers) {
        Vec3 d = gaussian_vec(rng, 1.0);
        while (d.norm() < 1e-9) d = gaussian_vec(rng, 1.0);
        c = box.center() + 1.2 * diag * d.normalized();
      }
      std::vector<Vec3> extra;
      extra.reserve(count);
      for (std::size_t i = 0; i < count; ++i) extra.push_back(centers[i % kBlobs] + gaussian_vec(rng, s));
      return append_points(cloud, extra, rng);
    }
    case CorruptionKind::surface_outliers: {
      const auto normals = estimate_normals(cloud.positions());
      const Vec3 center = box.center();
      std::normal_distribution<double> g(0.0, s);
      std::vector<Vec3> extra;
      for (std::size_t i : pick_sources(cloud.size(), spec.ratio, rng)) {
        Vec3 n = normals[i];
        if (n.dot(cloud[i] - center) < 0.0) n = -n;
        extra.push_back(cloud[i] + g(rng) * n);
      }
      return append_points(cloud, extra, rng);
    }
  }
  throw InvalidArgument("unknown corruption kind");
}

}  // namespace sepmem
