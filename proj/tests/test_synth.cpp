#include "sepmem/mesh.hpp"
#include "sepmem/separability.hpp"
#include "sepmem/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace sepmem;

TEST_CASE("gen_sphere") {
  const PointCloud s = gen_sphere(1000, 2.5, 7);
  CHECK(s.size() == 1000);
  for (const Vec3& p : s.positions()) CHECK(std::abs(p.norm() - 2.5) <= 1e-12);

  const PointCloud big = gen_sphere(10000, 1.0, 8);
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : big.positions()) centroid += p;
  centroid /= 10000.0;
  // Each coordinate has variance 1/3 per point.
  CHECK(centroid.norm() <= 4.0 * std::sqrt(1.0 / 3.0 / 10000.0) * std::sqrt(3.0));

  CHECK(gen_sphere(50, 1.0, 1).positions() == gen_sphere(50, 1.0, 1).positions());
  CHECK(gen_sphere(50, 1.0, 1).positions() != gen_sphere(50, 1.0, 2).positions());
  CHECK_THROWS_AS(gen_sphere(0, 1.0, 1), InvalidArgument);
}

TEST_CASE("add_duplicated_outliers") {
  const PointCloud base = gen_sphere(500, 1.0, 3);
  SUBCASE("sigma = 0 duplicates in place") {
    const PointCloud out = add_duplicated_outliers(base, 0.0, 1);
    REQUIRE(out.size() == 1000);
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(out[i] == base[i]);
      CHECK(out[i + base.size()] == base[i]);
    }
  }
  SUBCASE("spread follows sigma times the diagonal") {
    const double sigma = 0.11;
    const PointCloud out = add_duplicated_outliers(base, sigma, 2);
    REQUIRE(out.size() == 2 * base.size());
    double var = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) var += (out[i + base.size()] - base[i]).squaredNorm();
    var /= 3.0 * static_cast<double>(base.size());
    const double want = sigma * base.bounds().diagonal();
    CHECK(std::sqrt(var) == doctest::Approx(want).epsilon(0.1));
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(out[i] == base[i]);
  }
  SUBCASE("outliers get dark intensity") {
    const PointCloud painted = paint_intensity(base, 1.0, 1.0, 4);
    const PointCloud out = add_duplicated_outliers(painted, 0.025, 5);
    const auto& intensity = out.attribute("intensity");
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(intensity[i] == 1.0);
      CHECK(intensity[i + base.size()] <= 0.2);
    }
  }
  CHECK_THROWS_AS(add_duplicated_outliers(base, -0.1, 1), InvalidArgument);
}

TEST_CASE("gen_colored_plane") {
  SUBCASE("single region has constant intensity") {
    PlaneSpec spec;
    spec.regions = {{0.0, 1.0, 0.05, 0.4}};
    const PointCloud plane = gen_colored_plane(spec, 1);
    for (double v : plane.attribute("intensity")) CHECK(v == 0.4);
    for (const Vec3& p : plane.positions()) CHECK(p.z() == 0.0);
  }
  SUBCASE("two densities differ across the boundary") {
    PlaneSpec spec;
    spec.regions = {{0.0, 1.0, 0.02, 0.5}, {1.0, 2.0, 0.04, 0.5}};
    const PointCloud plane = gen_colored_plane(spec, 2);
    const auto& density = plane.attribute("density");
    double left = 0.0, right = 0.0;
    int nl = 0, nr = 0;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      const Vec3& p = plane[i];
      if (p.y() < 0.2 || p.y() > 0.8) continue;
      if (p.x() > 0.2 && p.x() < 0.8) {
        left += density[i];
        ++nl;
      } else if (p.x() > 1.2 && p.x() < 1.8) {
        right += density[i];
        ++nr;
      }
    }
    CHECK(left / nl > 2.0 * (right / nr));
    // The same contrast in the knn spacing estimate.
    const auto spacing = knn_spacing(plane, 8);
    double sl = 0.0, sr = 0.0;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      const Vec3& p = plane[i];
      if (p.y() < 0.2 || p.y() > 0.8) continue;
      if (p.x() > 0.2 && p.x() < 0.8) sl += spacing[i];
      if (p.x() > 1.2 && p.x() < 1.8) sr += spacing[i];
    }
    CHECK(sl / nl < 0.75 * (sr / nr));
  }
  SUBCASE("color step peaks the intensity map at the boundary") {
    PlaneSpec spec;
    spec.regions = {{0.0, 1.0, 0.03, 0.1}, {1.0, 2.0, 0.03, 0.9}};
    const PointCloud plane = gen_colored_plane(spec, 3);
    SeparabilitySettings s;
    s.attributes = {"intensity"};
    s.weights.w = {0.0, 1.0};
    const SeparabilityContext ctx(plane, s);
    GridSpec grid;
    grid.origin = Vec3(0.3, 0.5, 0.0);
    grid.step = Vec3(0.02, 1.0, 1.0);
    grid.counts = {71, 1, 1};
    const auto eta = separability_map(ctx, grid, Vec3(1, 0, 0), Vec3(0.12, 0.3, 0.2));
    const auto best = static_cast<std::size_t>(std::max_element(eta.begin(), eta.end()) - eta.begin());
    CHECK(std::abs(grid.points()[best].x() - 1.0) <= 0.03);
  }
  SUBCASE("invalid specs") {
    CHECK_THROWS_AS(gen_colored_plane(PlaneSpec{}, 1), InvalidArgument);
    PlaneSpec bad;
    bad.regions = {{1.0, 0.0, 0.1, 0.5}};
    CHECK_THROWS_AS(gen_colored_plane(bad, 1), InvalidArgument);
  }
}

TEST_CASE("corrupt") {
  const PointCloud base = paint_intensity(gen_sphere(400, 1.0, 9), 0.5, 1.0, 10);

  SUBCASE("zero noise is the identity") {
    const PointCloud out = corrupt(base, {CorruptionKind::gaussian_noise, 0.0, 1.0, 1});
    CHECK(out.positions() == base.positions());
  }
  SUBCASE("noise perturbs every point by sigma times the diagonal") {
    const PointCloud out = corrupt(base, parse_corruption("gaussian_noise:sigma=0.005,seed=3"));
    REQUIRE(out.size() == base.size());
    double var = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) var += (out[i] - base[i]).squaredNorm();
    var /= 3.0 * static_cast<double>(base.size());
    CHECK(std::sqrt(var) == doctest::Approx(0.005 * base.bounds().diagonal()).epsilon(0.15));
    CHECK(out.attribute("intensity") == base.attribute("intensity"));
  }
  SUBCASE("region outliers at ratio 1 double the cloud, far from the object") {
    const PointCloud out = corrupt(base, {CorruptionKind::region_outliers, 0.05, 1.0, 4});
    REQUIRE(out.size() == 2 * base.size());
    const double diag = base.bounds().diagonal();
    for (std::size_t i = base.size(); i < out.size(); ++i) CHECK(out[i].norm() > 1.2 * diag - 0.5 * diag);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(out[i] == base[i]);
  }
  SUBCASE("surface outliers move along the radial direction") {
    const PointCloud out = corrupt(base, parse_corruption("surface_outliers:sigma=0.05,ratio=0.5,seed=5"));
    CHECK(out.size() == base.size() + 200);
    int radial = 0;
    for (std::size_t i = base.size(); i < out.size(); ++i) {
      const Vec3 p = out[i];
      // Displacement along the normal keeps the tangential position: the
      // nearest original point lies on the same ray.
      double best = 1e9;
      for (const Vec3& q : base.positions()) best = std::min(best, (p.normalized() - q).norm());
      radial += best < 0.05 ? 1 : 0;
    }
    CHECK(radial >= 190);
  }
  SUBCASE("injected points get distinct dark attributes") {
    const PointCloud out = corrupt(base, parse_corruption("duplicated_outliers:sigma=0.01,ratio=1,seed=6"));
    const auto& intensity = out.attribute("intensity");
    for (std::size_t i = base.size(); i < out.size(); ++i) CHECK(intensity[i] < 0.5);
  }
  SUBCASE("deterministic per seed") {
    const auto spec = parse_corruption("duplicated_outliers:sigma=0.1,seed=7");
    CHECK(corrupt(base, spec).positions() == corrupt(base, spec).positions());
    auto other = spec;
    other.seed = 8;
    CHECK(corrupt(base, spec).positions() != corrupt(base, other).positions());
  }
  SUBCASE("parse errors") {
    CHECK_THROWS_AS(parse_corruption("meteor_shower"), InvalidArgument);
    CHECK_THROWS_AS(parse_corruption("gaussian_noise:sigma"), InvalidArgument);
    CHECK_THROWS_AS(parse_corruption("gaussian_noise:color=1"), InvalidArgument);
    CHECK_THROWS_AS(parse_corruption("gaussian_noise:sigma=-1"), InvalidArgument);
  }
}

TEST_CASE("bumpy ellipsoid") {
  const TriangleMesh mesh = bumpy_ellipsoid_mesh(32);
  CHECK(is_watertight(mesh));
  CHECK(euler_characteristic(mesh) == 2);
  // The lobe along +y reaches past the ellipsoid's 0.75 semi-axis.
  double y_max = 0.0;
  for (const Vec3& v : mesh.vertices) y_max = std::max(y_max, v.y());
  CHECK(y_max == doctest::Approx(1.1).epsilon(0.01));

  const PointCloud cloud = gen_bumpy_ellipsoid(2000, 5);
  CHECK(cloud.size() == 2000);
  CHECK(cloud.positions() == gen_bumpy_ellipsoid(2000, 5).positions());
}
