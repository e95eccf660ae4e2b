#include "sepmem/cli.hpp"
#include "sepmem/config.hpp"
#include "sepmem/io.hpp"
#include "sepmem/synth.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace sepmem;
namespace fs = std::filesystem;

namespace {

// Fresh directory per test case, removed afterwards.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("sepmem_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  auto pts = testing::random_points(n, seed, -3.0, 7.0);
  std::vector<double> intensity(n);
  for (std::size_t i = 0; i < n; ++i) intensity[i] = std::fmod(pts[i].norm(), 1.0);
  return PointCloud(std::move(pts), {{"intensity", intensity}});
}

}  // namespace

TEST_CASE("cloud round trips") {
  TempDir dir;
  const PointCloud cloud = random_cloud(1000, 1);

  SUBCASE("binary PLY is bit-identical") {
    write_cloud(cloud, dir / "c.ply", CloudFormat::ply_binary);
    const PointCloud back = read_cloud(dir / "c.ply");
    REQUIRE(back.size() == cloud.size());
    CHECK(std::memcmp(back.positions().data(), cloud.positions().data(), sizeof(Vec3) * cloud.size()) == 0);
    CHECK(back.attribute("intensity") == cloud.attribute("intensity"));
  }
  SUBCASE("text formats keep 9 significant digits") {
    for (auto [name, format] : {std::pair{"a.ply", CloudFormat::ply_ascii}, std::pair{"b.xyz", CloudFormat::xyz},
                                std::pair{"c.obj", CloudFormat::obj}}) {
      write_cloud(cloud, dir / name, format);
      const PointCloud back = read_cloud(dir / name);
      REQUIRE(back.size() == cloud.size());
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (int a = 0; a < 3; ++a) CHECK(std::abs(back[i][a] - cloud[i][a]) <= 1e-9 * std::abs(cloud[i][a]));
      }
    }
  }
  SUBCASE("format from extension") {
    CHECK(cloud_format_for("x.ply") == CloudFormat::ply_binary);
    CHECK(cloud_format_for("x.xyz") == CloudFormat::xyz);
    CHECK(cloud_format_for("x.obj") == CloudFormat::obj);
    CHECK_THROWS_AS(cloud_format_for("x.las"), InvalidArgument);
    CHECK(mesh_format_for("m.obj") == MeshFormat::obj);
    CHECK_THROWS_AS(mesh_format_for("m.stl"), InvalidArgument);
  }
}

TEST_CASE("read_cloud parsing rules") {
  TempDir dir;
  SUBCASE("XYZ with three columns has no attributes") {
    write_text(dir / "p.xyz", "0 0 0\n1 2 3\n# comment\n4.5 -1 2e-3\n");
    const PointCloud c = read_cloud(dir / "p.xyz");
    CHECK(c.size() == 3);
    CHECK(c.attributes().empty());
    CHECK(c[2] == Vec3(4.5, -1, 2e-3));
  }
  SUBCASE("PLY red/green/blue become intensity") {
    write_text(dir / "rgb.ply",
               "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
               "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n"
               "0 0 0 255 255 255\n1 0 0 30 60 90\n");
    const PointCloud c = read_cloud(dir / "rgb.ply");
    REQUIRE(c.has_attribute("intensity"));
    CHECK(c.attribute("intensity")[0] == 1.0);
    CHECK(c.attribute("intensity")[1] == doctest::Approx(60.0 / 255.0).epsilon(1e-15));
    CHECK_FALSE(c.has_attribute("red"));
  }
  SUBCASE("explicit intensity wins over color") {
    write_text(dir / "i.ply",
               "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\nproperty double y\nproperty double z\n"
               "property uchar red\nproperty uchar green\nproperty uchar blue\nproperty float intensity\nend_header\n"
               "0 0 0 255 255 255 0.25\n");
    CHECK(read_cloud(dir / "i.ply").attribute("intensity")[0] == 0.25);
  }
  SUBCASE("non-finite rows are dropped and counted") {
    write_text(dir / "n.xyz", "0 0 0\nnan 1 1\n1 1 1\ninf 0 0\n");
    ReadReport report;
    const PointCloud c = read_cloud(dir / "n.xyz", &report);
    CHECK(c.size() == 2);
    CHECK(report.dropped == 2);
  }
  SUBCASE("malformed rows name the line") {
    write_text(dir / "bad.xyz", "0 0 0\n1 1 1\n1 two 3\n");
    CHECK_THROWS_WITH_AS(read_cloud(dir / "bad.xyz"), doctest::Contains(":3:"), DataError);
    write_text(dir / "bad.ply", "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_head\n");
    CHECK_THROWS_AS(read_cloud(dir / "bad.ply"), DataError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(read_cloud(dir / "none.ply"), DataError); }
}

TEST_CASE("mesh round trips") {
  TempDir dir;
  const TriangleMesh mesh = bumpy_ellipsoid_mesh(8);
  TriangleMesh with_normals = mesh;
  for (const Vec3& v : mesh.vertices) with_normals.normals.push_back(v.normalized());

  SUBCASE("OBJ keeps faces and is 1-based") {
    write_mesh(with_normals, dir / "m.obj", MeshFormat::obj);
    const TriangleMesh back = read_mesh(dir / "m.obj");
    CHECK(back.triangles == mesh.triangles);
    CHECK(back.has_normals());
    const std::string text = read_bytes(dir / "m.obj");
    CHECK(text.find("\nf 1//1 ") != std::string::npos);
    CHECK(text.find(" 0//0") == std::string::npos);
    CHECK(is_watertight(back));
  }
  SUBCASE("PLY keeps faces, vertices and normals exactly") {
    write_mesh(with_normals, dir / "m.ply", MeshFormat::ply);
    const TriangleMesh back = read_mesh(dir / "m.ply");
    CHECK(back.triangles == mesh.triangles);
    CHECK(back.vertices == with_normals.vertices);
    CHECK(back.normals == with_normals.normals);
  }
  SUBCASE("no normals written when absent") {
    write_mesh(mesh, dir / "plain.ply", MeshFormat::ply);
    CHECK_FALSE(read_mesh(dir / "plain.ply").has_normals());
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(write_mesh(mesh, dir / "missing/dir/m.obj", MeshFormat::obj), DataError);
  }
}

TEST_CASE("run configuration") {
  SUBCASE("keys map onto the config") {
    std::istringstream in("# sphere run\nk = 16\nbeta=0.25\nsearch_extents = 0.2, 0.05,0.05\n"
                          "weights = 1,0.5\nattributes = intensity\ninit_grid = 8,8\nmax_grid = 8,8\n"
                          "density_mode = per_region\ndeterministic = true\nseed = 42\n\ninput = a.ply\n");
    const RunConfig c = parse_run_config(in);
    CHECK(c.membrane.k == 16);
    CHECK(c.membrane.beta == 0.25);
    CHECK(c.membrane.search_extents == Vec3(0.2, 0.05, 0.05));
    CHECK(c.membrane.weights.w == std::vector<double>{1.0, 0.5});
    CHECK(c.membrane.attributes == std::vector<std::string>{"intensity"});
    CHECK(c.membrane.init_grid == std::array<int, 2>{8, 8});
    CHECK(c.membrane.density_mode == DensityMode::per_region);
    CHECK(c.membrane.deterministic);
    CHECK(c.seed == 42);
    CHECK(c.input == "a.ply");
  }
  SUBCASE("unknown, repeated and invalid keys carry the line number") {
    std::istringstream unknown("k = 8\nfoo = 1\n");
    CHECK_THROWS_WITH_AS(parse_run_config(unknown), "line 2: unknown key 'foo'", InvalidArgument);
    std::istringstream repeated("k = 8\nk = 9\n");
    CHECK_THROWS_WITH_AS(parse_run_config(repeated), doctest::Contains("line 2"), InvalidArgument);
    std::istringstream bad("beta = half\n");
    CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("line 1"), InvalidArgument);
    std::istringstream no_eq("beta 0.5\n");
    CHECK_THROWS_AS(parse_run_config(no_eq), InvalidArgument);
  }
  SUBCASE("values are validated") {
    std::istringstream out_of_range("beta = 1.5\n");
    CHECK_THROWS_AS(parse_run_config(out_of_range), InvalidArgument);
    std::istringstream grids("init_grid = 50,30\n");
    CHECK_THROWS_AS(parse_run_config(grids), InvalidArgument);
  }
  SUBCASE("write then parse is the identity") {
    RunConfig c;
    c.membrane.beta = 0.3;
    c.membrane.weights.w = {1.0, 1.0 / 3.0};
    c.membrane.attributes = {"intensity"};
    c.membrane.search_scale = SearchScale::cloud;
    c.input = "in.ply";
    c.seed = 7;
    std::stringstream s;
    write_run_config(c, s);
    const RunConfig back = parse_run_config(s);
    CHECK(back.membrane.beta == c.membrane.beta);
    CHECK(back.membrane.weights.w == c.membrane.weights.w);
    CHECK(back.membrane.search_scale == SearchScale::cloud);
    CHECK(back.membrane.search_extents == c.membrane.search_extents);
    CHECK(back.input == "in.ply");
    CHECK(back.seed == 7);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_run_config("/nonexistent/run.cfg"), DataError); }
}

TEST_CASE("command line") {
  TempDir dir;

  SUBCASE("usage errors exit 1 with usage text") {
    const auto r = cli({"reconstruct", "--frobnicate"});
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(cli({}).code == exit_usage);
    CHECK(cli({"synth", "torus", "-o", dir / "t.ply"}).code == exit_usage);
  }
  SUBCASE("help exits 0") { CHECK(cli({"--help"}).code == exit_ok); }
  SUBCASE("synth, reconstruct, eval end to end") {
    REQUIRE(cli({"synth", "sphere", "-n", "1000", "--seed", "7", "-o", dir / "s.ply"}).code == exit_ok);
    CHECK(read_cloud(dir / "s.ply").size() == 1000);

    write_text(dir / "run.cfg", "init_grid = 8,8\nmax_grid = 8,8\n");
    const auto rec = cli({"reconstruct", dir / "s.ply", "-o", dir / "m.obj", "--config", dir / "run.cfg", "--trace",
                          dir / "t.csv", "--deterministic"});
    REQUIRE(rec.code == exit_ok);
    const TriangleMesh mesh = read_mesh(dir / "m.obj");
    CHECK(is_watertight(mesh));
    CHECK(euler_characteristic(mesh) == 2);
    CHECK(read_bytes(dir / "t.csv").rfind("iteration,eta_g,M,L,u_n,v_n,chamfer,seconds\n", 0) == 0);

    const auto ev = cli({"eval", "--pred", dir / "m.obj", "--gt", dir / "s.ply"});
    REQUIRE(ev.code == exit_ok);
    CHECK(ev.out.find("{\"pred\":") == 0);
    for (const char* key : {"Chamfer", "F-Score", "Normal C."}) CHECK(ev.out.find(key) != std::string::npos);
  }
  SUBCASE("plane and corruption") {
    REQUIRE(cli({"synth", "plane", "-o", dir / "p.ply"}).code == exit_ok);
    const PointCloud plane = read_cloud(dir / "p.ply");
    CHECK(plane.has_attribute("intensity"));
    REQUIRE(cli({"synth", "sphere", "-n", "200", "--corrupt", "duplicated_outliers:sigma=0.1", "-o", dir / "o.xyz"}).code ==
            exit_ok);
    CHECK(read_cloud(dir / "o.xyz").size() == 400);
    CHECK(cli({"synth", "sphere", "--corrupt", "bogus", "-o", dir / "x.ply"}).code == exit_usage);
  }
  SUBCASE("sepmap writes one row per cell") {
    REQUIRE(cli({"synth", "plane", "-o", dir / "p.ply"}).code == exit_ok);
    const auto r = cli({"sepmap", dir / "p.ply", "-o", dir / "map.csv", "--direction", "1,0,0", "--window",
                        "0.1,0.2,0.2", "--cells", "10", "--weights", "0,1", "--attributes", "intensity"});
    REQUIRE(r.code == exit_ok);
    const std::string csv = read_bytes(dir / "map.csv");
    CHECK(csv.rfind("x,y,z,eta\n", 0) == 0);
    // "wrote N cells (a x b x c)"
    const long cells = std::stol(r.out.substr(std::string("wrote ").size()));
    CHECK(cells > 10);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + cells);
  }
  SUBCASE("data errors exit 2") {
    CHECK(cli({"reconstruct", dir / "missing.ply", "-o", dir / "m.obj"}).code == exit_data);
    write_text(dir / "few.xyz", "0 0 0\n1 0 0\n0 1 0\n");
    CHECK(cli({"reconstruct", dir / "few.xyz", "-o", dir / "m.obj"}).code == exit_data);
  }
  SUBCASE("numerical failure exits 3") {
    std::string flat;
    for (const Vec3& p : testing::random_points(50, 3)) flat += std::to_string(p.x()) + " " + std::to_string(p.y()) + " 0\n";
    write_text(dir / "flat.xyz", flat);
    const auto r = cli({"reconstruct", dir / "flat.xyz", "-o", dir / "m.obj"});
    CHECK(r.code == exit_numerical);
    CHECK(r.err.find("degenerate initialization") != std::string::npos);
  }
}
