#include "sepmem/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace sepmem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidArgument("not an integer: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const long long v = to_integer(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw InvalidArgument("integer out of range: '" + s + "'");
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidArgument("not a boolean: '" + s + "'");
}

std::vector<double> to_doubles(const std::string& s, std::size_t expected) {
  const auto items = split_list(s);
  if (expected > 0 && items.size() != expected) {
    throw InvalidArgument("expected " + std::to_string(expected) + " comma-separated values");
  }
  std::vector<double> out;
  for (const auto& item : items) out.push_back(to_double(item));
  return out;
}

std::array<int, 2> to_int_pair(const std::string& s) {
  const auto items = split_list(s);
  if (items.size() != 2) throw InvalidArgument("expected 2 comma-separated integers");
  return {to_int(items[0]), to_int(items[1])};
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"k",
       [](RunConfig& c, const std::string& v) {
         const long long k = to_integer(v);
         if (k < 1) throw InvalidArgument("k must be at least 1");
         c.membrane.k = static_cast<std::size_t>(k);
       }},
      {"beta", [](RunConfig& c, const std::string& v) { c.membrane.beta = to_double(v); }},
      {"search_extents",
       [](RunConfig& c, const std::string& v) {
         const auto e = to_doubles(v, 3);
         c.membrane.search_extents = Vec3(e[0], e[1], e[2]);
       }},
      {"search_scale",
       [](RunConfig& c, const std::string& v) {
         if (v == "cloud") {
           c.membrane.search_scale = SearchScale::cloud;
         } else if (v == "membrane") {
           c.membrane.search_scale = SearchScale::membrane;
         } else {
           throw InvalidArgument("search_scale must be cloud or membrane");
         }
       }},
      {"n_splits", [](RunConfig& c, const std::string& v) { c.membrane.n_splits = to_int(v); }},
      {"weights", [](RunConfig& c, const std::string& v) { c.membrane.weights.w = to_doubles(v, 0); }},
      {"attributes", [](RunConfig& c, const std::string& v) { c.membrane.attributes = split_list(v); }},
      {"density_mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "global") {
           c.membrane.density_mode = DensityMode::global;
         } else if (v == "per_region") {
           c.membrane.density_mode = DensityMode::per_region;
         } else {
           throw InvalidArgument("density_mode must be global or per_region");
         }
       }},
      {"g_min", [](RunConfig& c, const std::string& v) { c.membrane.g_min = to_double(v); }},
      {"patience", [](RunConfig& c, const std::string& v) { c.membrane.patience = to_int(v); }},
      {"init_grid", [](RunConfig& c, const std::string& v) { c.membrane.init_grid = to_int_pair(v); }},
      {"max_grid", [](RunConfig& c, const std::string& v) { c.membrane.max_grid = to_int_pair(v); }},
      {"refine_increment", [](RunConfig& c, const std::string& v) { c.membrane.refine_increment = to_int_pair(v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.membrane.alpha = to_double(v); }},
      {"div_min", [](RunConfig& c, const std::string& v) { c.membrane.div_min = to_int(v); }},
      {"max_iterations", [](RunConfig& c, const std::string& v) { c.membrane.max_iterations = to_int(v); }},
      {"margin", [](RunConfig& c, const std::string& v) { c.membrane.margin = to_double(v); }},
      {"mesh_resolution", [](RunConfig& c, const std::string& v) { c.membrane.mesh_resolution = to_int_pair(v); }},
      {"deterministic", [](RunConfig& c, const std::string& v) { c.membrane.deterministic = to_bool(v); }},
      {"trace_chamfer", [](RunConfig& c, const std::string& v) { c.membrane.trace_chamfer = to_bool(v); }},
      {"shrink_search", [](RunConfig& c, const std::string& v) { c.membrane.shrink_search = to_bool(v); }},
      {"search_reference_grid",
       [](RunConfig& c, const std::string& v) { c.membrane.search_reference_grid = to_int_pair(v); }},
      {"shrink_floor", [](RunConfig& c, const std::string& v) { c.membrane.shrink_floor = to_double(v); }},
      {"refine_min_width", [](RunConfig& c, const std::string& v) { c.membrane.refine_min_width = to_double(v); }},
      {"input", [](RunConfig& c, const std::string& v) { c.input = v; }},
      {"output", [](RunConfig& c, const std::string& v) { c.output = v; }},
      {"trace", [](RunConfig& c, const std::string& v) { c.trace = v; }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = to_integer(v);
         if (s < 0) throw InvalidArgument("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw InvalidArgument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw InvalidArgument("line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
  }
  config.membrane.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  try {
    return parse_run_config(in);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void write_run_config(const RunConfig& config, std::ostream& out) {
  const MembraneConfig& m = config.membrane;
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  std::vector<std::string> weights;
  for (double w : m.weights.w) {
    std::ostringstream s;
    s.precision(std::numeric_limits<double>::max_digits10);
    s << w;
    weights.push_back(s.str());
  }
  out << "k = " << m.k << "\n";
  out << "beta = " << m.beta << "\n";
  out << "search_extents = " << m.search_extents[0] << "," << m.search_extents[1] << "," << m.search_extents[2] << "\n";
  out << "search_scale = " << (m.search_scale == SearchScale::cloud ? "cloud" : "membrane") << "\n";
  out << "n_splits = " << m.n_splits << "\n";
  out << "weights = " << join(weights) << "\n";
  out << "attributes = " << join(m.attributes) << "\n";
  out << "density_mode = " << (m.density_mode == DensityMode::global ? "global" : "per_region") << "\n";
  out << "g_min = " << m.g_min << "\n";
  out << "patience = " << m.patience << "\n";
  out << "init_grid = " << m.init_grid[0] << "," << m.init_grid[1] << "\n";
  out << "max_grid = " << m.max_grid[0] << "," << m.max_grid[1] << "\n";
  out << "refine_increment = " << m.refine_increment[0] << "," << m.refine_increment[1] << "\n";
  out << "alpha = " << m.alpha << "\n";
  out << "div_min = " << m.div_min << "\n";
  out << "max_iterations = " << m.max_iterations << "\n";
  out << "margin = " << m.margin << "\n";
  out << "mesh_resolution = " << m.mesh_resolution[0] << "," << m.mesh_resolution[1] << "\n";
  out << "deterministic = " << (m.deterministic ? "true" : "false") << "\n";
  out << "trace_chamfer = " << (m.trace_chamfer ? "true" : "false") << "\n";
  out << "shrink_search = " << (m.shrink_search ? "true" : "false") << "\n";
  out << "search_reference_grid = " << m.search_reference_grid[0] << "," << m.search_reference_grid[1] << "\n";
  out << "shrink_floor = " << m.shrink_floor << "\n";
  out << "refine_min_width = " << m.refine_min_width << "\n";
  out << "input = " << config.input << "\n";
  out << "output = " << config.output << "\n";
  out << "trace = " << config.trace << "\n";
  out << "seed = " << config.seed << "\n";
  out.precision(old_precision);
}

}  // namespace sepmem
