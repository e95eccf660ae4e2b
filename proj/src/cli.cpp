#include "sepmem/cli.hpp"

#include "sepmem/config.hpp"
#include "sepmem/io.hpp"
#include "sepmem/membrane.hpp"
#include "sepmem/metrics.hpp"
#include "sepmem/separability.hpp"
#include "sepmem/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

namespace sepmem {

namespace {

struct ReconstructArgs {
  std::string input;
  std::string output;
  std::string config;
  std::string trace;
  bool deterministic = false;
};

struct SepmapArgs {
  std::string input;
  std::string output;
  std::vector<double> direction;
  std::vector<double> window;
  int cells = 40;
  std::size_t k = 8;
  std::vector<double> weights{1.0};
  std::vector<std::string> attributes;
  std::string density_mode = "global";
};

struct SynthArgs {
  std::string shape;
  std::string output;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double radius = 1.0;
  std::vector<double> intensity;
  std::string corrupt;
};

struct EvalArgs {
  std::string pred;
  std::string gt;
  double tau_pct = 1.0;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

void warn_dropped(const ReadReport& report, const std::string& path, std::ostream& err) {
  if (report.dropped > 0) err << "warning: " << path << ": dropped " << report.dropped << " rows with non-finite coordinates\n";
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (!a.config.empty()) config = load_run_config(a.config);
  if (!a.input.empty()) config.input = a.input;
  if (!a.output.empty()) config.output = a.output;
  if (!a.trace.empty()) config.trace = a.trace;
  if (a.deterministic) config.membrane.deterministic = true;
  if (config.input.empty()) throw InvalidArgument("no input cloud given");
  if (config.output.empty()) throw InvalidArgument("no output mesh given (-o)");
  const MeshFormat format = mesh_format_for(config.output);

  ReadReport report;
  const PointCloud cloud = read_cloud(config.input, &report);
  warn_dropped(report, config.input, err);
  if (cloud.size() < 7) throw DataError(config.input + ": reconstruction needs at least 7 points, got " + std::to_string(cloud.size()));

  const Reconstruction result = reconstruct(cloud, config.membrane);
  write_mesh(result.mesh, config.output, format);
  if (!config.trace.empty()) {
    std::ofstream trace(config.trace, std::ios::binary | std::ios::trunc);
    if (!trace) throw DataError("cannot open trace file " + config.trace);
    write_trace_csv(result.trace, trace);
    if (!trace) throw DataError("write failed: " + config.trace);
  }
  const TraceRecord& last = result.trace.back();
  out << "iterations " << result.trace.size() << ", eta_g " << last.eta_g << ", grid " << last.M << "x" << last.L
      << ", chamfer to input " << last.chamfer << "\n";
  return exit_ok;
}

int cmd_sepmap(const SepmapArgs& a, std::ostream& out, std::ostream& err) {
  if (a.cells < 1) throw InvalidArgument("--cells must be positive");
  const Vec3 direction(a.direction[0], a.direction[1], a.direction[2]);
  if (!(direction.norm() > 0.0)) throw InvalidArgument("--direction must be non-zero");
  const Vec3 window(a.window[0], a.window[1], a.window[2]);
  if (!(window.minCoeff() > 0.0)) throw InvalidArgument("--window dimensions must be positive");

  SeparabilitySettings settings;
  settings.k = a.k;
  settings.weights.w = a.weights;
  settings.attributes = a.attributes;
  if (a.density_mode == "global") {
    settings.density_mode = DensityMode::global;
  } else if (a.density_mode == "per_region") {
    settings.density_mode = DensityMode::per_region;
  } else {
    throw InvalidArgument("--density-mode must be global or per_region");
  }
  settings.weights.validate();
  if (settings.weights.w.size() != settings.attributes.size() + 1) {
    throw InvalidArgument("--weights needs one value for the point term plus one per attribute");
  }

  ReadReport report;
  const PointCloud cloud = read_cloud(a.input, &report);
  warn_dropped(report, a.input, err);
  if (cloud.size() <= settings.k) throw DataError(a.input + ": too few points for k = " + std::to_string(settings.k));
  for (const auto& name : settings.attributes) {
    if (!cloud.has_attribute(name)) throw DataError(a.input + ": no attribute '" + name + "'");
  }
  const SeparabilityContext ctx(cloud, settings);

  const BoundingBox box = cloud.bounds();
  const Vec3 extent = box.extent();
  const double step = extent.maxCoeff() / a.cells;
  GridSpec grid;
  grid.origin = box.min;
  grid.step = Vec3::Constant(step > 0.0 ? step : 1.0);
  for (int i = 0; i < 3; ++i) grid.counts[i] = step > 0.0 ? static_cast<int>(std::floor(extent[i] / step + 1e-9)) + 1 : 1;

  const std::vector<double> eta = separability_map(ctx, grid, direction, window);
  const std::vector<Vec3> points = grid.points();
  std::ofstream csv(a.output, std::ios::binary | std::ios::trunc);
  if (!csv) throw DataError("cannot open " + a.output + " for writing");
  csv << std::setprecision(std::numeric_limits<double>::max_digits10);
  csv << "x,y,z,eta\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    csv << points[i].x() << ',' << points[i].y() << ',' << points[i].z() << ',' << eta[i] << '\n';
  }
  if (!csv) throw DataError("write failed: " + a.output);
  out << "wrote " << points.size() << " cells (" << grid.counts[0] << "x" << grid.counts[1] << "x" << grid.counts[2]
      << ") to " << a.output << "\n";
  return exit_ok;
}

// Three strips: an intensity step at x = 1 and a spacing step at x = 2.
PlaneSpec default_plane() {
  PlaneSpec spec;
  spec.height = 1.0;
  spec.regions = {{0.0, 1.0, 0.02, 0.2}, {1.0, 2.0, 0.02, 0.8}, {2.0, 3.0, 0.04, 0.8}};
  return spec;
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& /*err*/) {
  const CloudFormat format = cloud_format_for(a.output);
  PointCloud cloud;
  if (a.shape == "sphere") {
    if (a.n < 1) throw InvalidArgument("-n must be positive");
    if (!(a.radius > 0.0)) throw InvalidArgument("--radius must be positive");
    cloud = gen_sphere(a.n, a.radius, a.seed);
  } else {
    cloud = gen_colored_plane(default_plane(), a.seed);
  }
  if (!a.intensity.empty()) {
    if (!(a.intensity[0] <= a.intensity[1])) throw InvalidArgument("--intensity needs lo <= hi");
    cloud = paint_intensity(cloud, a.intensity[0], a.intensity[1], a.seed + 1);
  }
  if (!a.corrupt.empty()) cloud = corrupt(cloud, parse_corruption(a.corrupt));
  write_cloud(cloud, a.output, format);
  out << "wrote " << cloud.size() << " points to " << a.output << "\n";
  return exit_ok;
}

// Meshes with faces are sampled; anything else is taken as a point set.
SurfaceSamples load_surface(const std::string& path, std::size_t samples, std::uint64_t seed, std::ostream& err) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".obj" || ext == ".ply" || ext == ".OBJ" || ext == ".PLY") {
    const TriangleMesh mesh = read_mesh(path);
    if (!mesh.triangles.empty()) return sample_mesh(mesh, samples, seed);
  }
  ReadReport report;
  const PointCloud cloud = read_cloud(path, &report);
  warn_dropped(report, path, err);
  if (cloud.empty()) throw DataError(path + ": no points");
  return SurfaceSamples{cloud.positions(), {}};
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.tau_pct > 0.0)) throw InvalidArgument("--tau-pct must be positive");
  if (a.samples < 1) throw InvalidArgument("--samples must be positive");
  const SurfaceSamples pred = load_surface(a.pred, a.samples, a.seed, err);
  const SurfaceSamples gt = load_surface(a.gt, a.samples, a.seed + 1, err);
  const MetricsReport m = evaluate(pred, gt, a.tau_pct / 100.0);

  nlohmann::ordered_json record;
  record["pred"] = a.pred;
  record["gt"] = a.gt;
  record["chamfer"] = m.chamfer;
  record["fscore"] = m.fscore;
  record["precision"] = m.precision;
  record["recall"] = m.recall;
  record["normal_consistency"] = m.normal_consistency;
  record["tau"] = m.threshold;
  out << record.dump() << "\n";

  out << std::fixed << std::setprecision(6);
  out << std::left << std::setw(20) << "metric" << "value\n";
  out << std::setw(20) << "Chamfer" << m.chamfer << "\n";
  out << std::setw(20) << "F-Score" << m.fscore << "\n";
  out << std::setw(20) << "  precision" << m.precision << "\n";
  out << std::setw(20) << "  recall" << m.recall << "\n";
  out << std::setw(20) << "Normal C." << m.normal_consistency << "\n";
  out << std::setw(20) << "tau" << m.threshold << "\n";
  out.unsetf(std::ios::floatfield | std::ios::adjustfield);
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-surface reconstruction from point clouds by separability-driven membranes", "sepmem"};
  app.require_subcommand(1);

  ReconstructArgs rec;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Fit a closed membrane to a point cloud and write a mesh");
  reconstruct_cmd->add_option("input", rec.input, "Input cloud (.ply, .obj, .xyz)");
  reconstruct_cmd->add_option("-o,--output", rec.output, "Output mesh (.obj or .ply)");
  reconstruct_cmd->add_option("--config", rec.config, "key=value configuration file");
  reconstruct_cmd->add_option("--trace", rec.trace, "Per-iteration CSV trace");
  reconstruct_cmd->add_flag("--deterministic", rec.deterministic, "Record zero wall times in the trace");

  SepmapArgs map;
  auto* sepmap_cmd = app.add_subcommand("sepmap", "Write a separability map over the cloud's bounding box");
  sepmap_cmd->add_option("input", map.input, "Input cloud")->required();
  sepmap_cmd->add_option("-o,--output", map.output, "Output CSV (x,y,z,eta)")->required();
  sepmap_cmd->add_option("--direction", map.direction, "Window axis x,y,z")->required()->delimiter(',')->expected(3);
  sepmap_cmd->add_option("--window", map.window, "Window size d,h,w")->required()->delimiter(',')->expected(3);
  sepmap_cmd->add_option("--cells", map.cells, "Grid cells along the longest bounding-box side")->capture_default_str();
  sepmap_cmd->add_option("--k", map.k, "Neighbors for the spacing estimate")->capture_default_str();
  sepmap_cmd->add_option("--weights", map.weights, "Weights: point term, then one per attribute")->delimiter(',');
  sepmap_cmd->add_option("--attributes", map.attributes, "Attribute channels")->delimiter(',');
  sepmap_cmd->add_option("--density-mode", map.density_mode, "global or per_region")->capture_default_str();

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic cloud");
  synth_cmd->add_option("shape", syn.shape, "sphere or plane")->required()->check(CLI::IsMember({"sphere", "plane"}));
  synth_cmd->add_option("-o,--output", syn.output, "Output cloud (.ply, .obj, .xyz)")->required();
  synth_cmd->add_option("-n", syn.n, "Sphere point count")->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--radius", syn.radius, "Sphere radius")->capture_default_str();
  synth_cmd->add_option("--intensity", syn.intensity, "Paint uniform intensity lo,hi")->delimiter(',')->expected(2);
  synth_cmd->add_option("--corrupt", syn.corrupt, "kind[:sigma=..,ratio=..,seed=..]");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a prediction against a ground truth");
  eval_cmd->add_option("--pred", ev.pred, "Predicted mesh or cloud")->required();
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth mesh or cloud")->required();
  eval_cmd->add_option("--tau-pct", ev.tau_pct, "F-Score threshold, percent of the ground-truth diagonal")
      ->capture_default_str();
  eval_cmd->add_option("--samples", ev.samples, "Points sampled per mesh")->capture_default_str();
  eval_cmd->add_option("--seed", ev.seed, "Sampling seed")->capture_default_str();

  std::vector<const char*> argv{"sepmem"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return exit_usage;
  }

  try {
    if (reconstruct_cmd->parsed()) return cmd_reconstruct(rec, out, err);
    if (sepmap_cmd->parsed()) return cmd_sepmap(map, out, err);
    if (synth_cmd->parsed()) return cmd_synth(syn, out, err);
    return cmd_eval(ev, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  }
}

}  // namespace sepmem
