#include "sepmem/membrane.hpp"
#include "sepmem/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sepmem;

namespace {

SeparabilitySettings settings_for(const MembraneConfig& c) {
  SeparabilitySettings s;
  s.k = c.k;
  s.density_mode = c.density_mode;
  s.weights = c.weights;
  s.attributes = c.attributes;
  return s;
}

double max_deviation(const BSplineSurface& a, const BSplineSurface& b) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double pu = u(rng), pv = u(rng);
    worst = std::max(worst, (a.evaluate(pu, pv) - b.evaluate(pu, pv)).norm());
  }
  return worst;
}

double mean_radial_error(const BSplineSurface& s) {
  const auto g = sample_grid(s, 40, 20);
  double sum = 0.0;
  for (const Vec3& p : g.points) sum += std::abs(p.norm() - 1.0);
  return sum / static_cast<double>(g.size());
}

// Records one iteration the way iterate does, without touching the surface.
void push_iteration(MembraneState& state, double eta) {
  state.eta_history.push_back(eta);
  ++state.iteration;
}

}  // namespace

TEST_CASE("MembraneConfig validation") {
  MembraneConfig c;
  CHECK_NOTHROW(c.validate());
  auto rejects = [](auto edit) {
    MembraneConfig bad;
    edit(bad);
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  };
  rejects([](MembraneConfig& m) { m.beta = 0.0; });
  rejects([](MembraneConfig& m) { m.beta = 1.0; });
  rejects([](MembraneConfig& m) { m.search_extents[1] = 0.0; });
  rejects([](MembraneConfig& m) { m.init_grid = {50, 5}; });
  rejects([](MembraneConfig& m) { m.weights.w = {1.0, 1.0}; });
  rejects([](MembraneConfig& m) { m.patience = 0; });
  rejects([](MembraneConfig& m) { m.max_iterations = 0; });
  rejects([](MembraneConfig& m) { m.k = 0; });
}

TEST_CASE("extreme_points") {
  SUBCASE("sphere samples") {
    const auto e = extreme_points(gen_sphere(5000, 1.0, 1));
    const std::array<Vec3, 6> axes{Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(),
                                   -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
    for (int i = 0; i < 6; ++i) CHECK((e[i] - axes[i]).norm() < 0.1);
  }
  SUBCASE("box corners, ties to the lowest index") {
    std::vector<Vec3> corners;
    for (int i = 0; i < 8; ++i) corners.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    const auto e = extreme_points(PointCloud(corners));
    CHECK(e[0] == corners[1]);
    CHECK(e[1] == corners[0]);
    CHECK(e[2] == corners[2]);
    CHECK(e[3] == corners[0]);
    CHECK(e[4] == corners[4]);
    CHECK(e[5] == corners[0]);
  }
  SUBCASE("single point") {
    const Vec3 p(1, 2, 3);
    for (const Vec3& e : extreme_points(PointCloud({p}))) CHECK(e == p);
  }
  SUBCASE("empty cloud") { CHECK_THROWS_AS(extreme_points(PointCloud()), InvalidArgument); }
}

TEST_CASE("init_octagon") {
  const PointCloud sphere = gen_sphere(1000, 1.0, 7);
  const double margin = 0.05 * sphere.bounds().diagonal();

  SUBCASE("encloses the unit sphere") {
    for (std::array<int, 2> grid : {std::array<int, 2>{8, 5}, std::array<int, 2>{8, 8}, std::array<int, 2>{40, 25}}) {
      const auto s = init_octagon(sphere, margin, grid);
      CHECK(s.count_u() == grid[0]);
      CHECK(s.count_v() == grid[1]);
      const auto mesh = to_mesh(s, 64, 32);
      for (const Vec3& p : mesh.vertices) CHECK(p.norm() >= 1.0);
    }
  }
  SUBCASE("outward normals") {
    const auto s = init_octagon(sphere, margin, {8, 5});
    const auto g = sample_grid(s, 16, 8);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.normals[i].dot(g.points[i]) > 0.0);
  }
  SUBCASE("translation moves the surface with the cloud") {
    const Vec3 t(3.0, -1.5, 0.25);
    std::vector<Vec3> moved;
    for (const Vec3& p : sphere.positions()) moved.push_back(p + t);
    const auto a = init_octagon(sphere, margin, {8, 5});
    const auto b = init_octagon(PointCloud(moved), margin, {8, 5});
    for (std::size_t i = 0; i < a.control().size(); ++i) CHECK((b.control()[i] - a.control()[i] - t).norm() < 1e-9);
  }
  SUBCASE("initial global separability is positive") {
    MembraneConfig c;
    const SeparabilityContext ctx(sphere, settings_for(c));
    MembraneState state(init_octagon(sphere, margin, c.init_grid));
    iterate(state, ctx, c);
    CHECK(state.eta_history.back() > 0.0);
  }
  SUBCASE("coplanar extremes") {
    std::vector<Vec3> flat;
    for (const Vec3& p : testing::random_points(50, 3)) flat.emplace_back(p.x(), p.y(), 0.0);
    CHECK_THROWS_WITH_AS(init_octagon(PointCloud(flat), 0.1, {8, 5}), "degenerate initialization", NumericalError);
  }
}

TEST_CASE("iterate") {
  const PointCloud sphere = gen_sphere(1000, 1.0, 7);
  MembraneConfig c;
  const SeparabilityContext ctx(sphere, settings_for(c));

  SUBCASE("a surface at radius 1.3 closes in monotonically") {
    MembraneState state(fit_closed_surface([](double u, double v) { return 1.3 * sphere_direction(u, v); }, 8, 5, 32, 20));
    double previous = mean_radial_error(state.surface);
    for (int i = 0; i < 5; ++i) {
      iterate(state, ctx, c);
      const double now = mean_radial_error(state.surface);
      CHECK(now < previous);
      previous = now;
    }
    CHECK(state.eta_history.size() == 5);
    CHECK(state.iteration == 5);
  }
  SUBCASE("beta = 0 is a fixpoint") {
    MembraneConfig still = c;
    still.beta = 0.0;
    MembraneState state(init_octagon(sphere, 0.1, {8, 5}));
    const BSplineSurface before = state.surface;
    iterate(state, ctx, still);
    CHECK(max_deviation(before, state.surface) < 1e-9);
  }
  SUBCASE("no evidence leaves the surface in place") {
    MembraneState state(fit_closed_surface([](double u, double v) { return Vec3(10, 10, 10) + 0.5 * sphere_direction(u, v); }, 8, 5, 32, 20));
    const BSplineSurface before = state.surface;
    iterate(state, ctx, c);
    CHECK(state.eta_history.back() == 0.0);
    CHECK(max_deviation(before, state.surface) < 1e-9);
  }
}

TEST_CASE("adjust and should_stop") {
  const auto surface = fit_closed_surface(sphere_direction, 8, 5, 32, 20);
  MembraneConfig c;
  c.max_grid = {8, 5};

  SUBCASE("stagnation counting stops at iteration 5") {
    MembraneState state(surface);
    double eta = 0.0;
    int stopped_at = 0;
    for (double improvement : {0.2, 0.1, 1e-5, 1e-5, 1e-5}) {
      eta += improvement;
      push_iteration(state, eta);
      adjust(state, c);
      if (should_stop(state, c)) {
        stopped_at = state.iteration;
        break;
      }
    }
    CHECK(stopped_at == 5);
  }
  SUBCASE("steady improvement runs to max_iterations") {
    c.max_iterations = 30;
    MembraneState state(surface);
    int stopped_at = 0;
    for (int i = 1; i <= 100; ++i) {
      push_iteration(state, 0.01 * i);
      adjust(state, c);
      if (should_stop(state, c)) {
        stopped_at = state.iteration;
        break;
      }
    }
    CHECK(stopped_at == 30);
  }
  SUBCASE("max_iterations = 1") {
    c.max_iterations = 1;
    MembraneState state(surface);
    push_iteration(state, 0.5);
    adjust(state, c);
    CHECK(should_stop(state, c));
  }
  SUBCASE("improvement above g_min leaves the grid alone") {
    c.max_grid = {40, 25};
    MembraneState state(surface);
    push_iteration(state, 0.3);
    push_iteration(state, 0.31);
    CHECK_FALSE(adjust(state, c));
    CHECK(state.surface.count_u() == 8);
    CHECK(state.surface.count_v() == 5);
  }
  SUBCASE("stagnation on 8x5 refines to 9x6 without moving the surface") {
    c.max_grid = {40, 25};
    const PointCloud sphere = gen_sphere(1000, 1.0, 7);
    const SeparabilityContext ctx(sphere, settings_for(c));
    MembraneState state(surface);
    iterate(state, ctx, c);
    state.eta_history.push_back(state.eta_history.back());
    const BSplineSurface before = state.surface;
    CHECK(adjust(state, c));
    CHECK(state.surface.count_u() == 9);
    CHECK(state.surface.count_v() == 6);
    CHECK(state.stagnation == 0);
    CHECK(max_deviation(before, state.surface) < 1e-9);
  }
  SUBCASE("no growth past the maximum grid") {
    c.max_grid = {40, 25};
    MembraneState state(init_octagon(gen_sphere(200, 1.0, 1), 0.1, {40, 25}));
    state.sample_params = {Vec2(0.5, 0.5)};
    state.sample_eta = {0.1};
    push_iteration(state, 0.4);
    push_iteration(state, 0.4);
    CHECK_FALSE(adjust(state, c));
    CHECK(state.surface.count_u() == 40);
    CHECK(state.surface.count_v() == 25);
    CHECK(state.stagnation == 1);
  }
}

TEST_CASE("reconstruct") {
  const PointCloud sphere = gen_sphere(1000, 1.0, 7);
  MembraneConfig c;
  c.init_grid = {8, 8};
  c.max_grid = {8, 8};
  c.deterministic = true;
  const auto r = reconstruct(sphere, c);

  SUBCASE("trace invariants") {
    REQUIRE_FALSE(r.trace.empty());
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].iteration == static_cast<int>(i) + 1);
      CHECK(r.trace[i].eta_g >= 0.0);
      CHECK(r.trace[i].eta_g <= 1.0);
      CHECK(r.trace[i].seconds == 0.0);
      CHECK(std::isfinite(r.trace[i].chamfer));
    }
    CHECK(is_watertight(r.mesh));
    CHECK(euler_characteristic(r.mesh) == 2);
  }
  SUBCASE("identical inputs give identical traces and meshes") {
    const auto again = reconstruct(sphere, c);
    REQUIRE(again.trace.size() == r.trace.size());
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      CHECK(again.trace[i].eta_g == r.trace[i].eta_g);
      CHECK(again.trace[i].chamfer == r.trace[i].chamfer);
    }
    CHECK(again.mesh.vertices == r.mesh.vertices);
  }
  SUBCASE("translation equivariance") {
    const Vec3 t(0.5, -0.25, 2.0);
    std::vector<Vec3> moved;
    for (const Vec3& p : sphere.positions()) moved.push_back(p + t);
    const auto m = reconstruct(PointCloud(moved), c);
    REQUIRE(m.mesh.vertices.size() == r.mesh.vertices.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < r.mesh.vertices.size(); ++i) {
      worst = std::max(worst, (m.mesh.vertices[i] - r.mesh.vertices[i] - t).norm());
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("trace CSV") {
    std::ostringstream out;
    write_trace_csv(r.trace, out);
    const std::string csv = out.str();
    CHECK(csv.rfind("iteration,eta_g,M,L,u_n,v_n,chamfer,seconds\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.trace.size() + 1);
  }
  SUBCASE("too few points") { CHECK_THROWS_AS(reconstruct(PointCloud(testing::random_points(6, 1)), c), InvalidArgument); }
}
