#include "sepmem/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sepmem {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << path.string();
  if (line > 0) msg << ":" << line;
  msg << ": " << what;
  throw DataError(msg.str());
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return true;
  // Accept inf/nan spellings from_chars may not handle on every platform.
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nan" || lower == "-nan") {
    out = std::nan("");
    return true;
  }
  if (lower == "inf" || lower == "infinity") {
    out = INFINITY;
    return true;
  }
  if (lower == "-inf" || lower == "-infinity") {
    out = -INFINITY;
    return true;
  }
  return false;
}

bool parse_long(std::string_view s, long& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Everything a reader can recover from a file, before it becomes a cloud or a mesh.
struct RawData {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::map<std::string, std::vector<double>> attributes;
  std::vector<std::array<int, 3>> triangles;
  std::size_t dropped = 0;
};

void add_polygon(RawData& raw, const std::vector<long>& ids, const std::filesystem::path& path, std::size_t line) {
  if (ids.size() < 3) fail(path, line, "face with fewer than 3 vertices");
  for (long id : ids) {
    if (id < 0 || id >= static_cast<long>(raw.positions.size())) fail(path, line, "face index out of range");
  }
  for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
    raw.triangles.push_back({static_cast<int>(ids[0]), static_cast<int>(ids[k]), static_cast<int>(ids[k + 1])});
  }
}

// Converts "red/green/blue" to intensity unless an intensity channel already exists.
void derive_intensity(std::map<std::string, std::vector<double>>& attrs) {
  const bool rgb = attrs.contains("red") && attrs.contains("green") && attrs.contains("blue");
  if (rgb && !attrs.contains("intensity")) {
    const auto& r = attrs["red"];
    const auto& g = attrs["green"];
    const auto& b = attrs["blue"];
    std::vector<double> intensity(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) intensity[i] = (r[i] + g[i] + b[i]) / 3.0 / 255.0;
    attrs["intensity"] = std::move(intensity);
  }
  if (rgb) {
    attrs.erase("red");
    attrs.erase("green");
    attrs.erase("blue");
  }
  attrs.erase("alpha");
}

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view name) {
  static const std::map<std::string, PlyType, std::less<>> types{
      {"char", PlyType::i8},    {"int8", PlyType::i8},     {"uchar", PlyType::u8},   {"uint8", PlyType::u8},
      {"short", PlyType::i16},  {"int16", PlyType::i16},   {"ushort", PlyType::u16}, {"uint16", PlyType::u16},
      {"int", PlyType::i32},    {"int32", PlyType::i32},   {"uint", PlyType::u32},   {"uint32", PlyType::u32},
      {"float", PlyType::f32},  {"float32", PlyType::f32}, {"double", PlyType::f64}, {"float64", PlyType::f64}};
  const auto it = types.find(name);
  if (it == types.end()) return std::nullopt;
  return it->second;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8:
      return 1;
    case PlyType::i16:
    case PlyType::u16:
      return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32:
      return 4;
    case PlyType::f64:
      return 8;
  }
  return 0;
}

template <typename T>
double load_as_double(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return static_cast<double>(v);
}

double ply_load(PlyType t, const char* p) {
  switch (t) {
    case PlyType::i8:
      return load_as_double<std::int8_t>(p);
    case PlyType::u8:
      return load_as_double<std::uint8_t>(p);
    case PlyType::i16:
      return load_as_double<std::int16_t>(p);
    case PlyType::u16:
      return load_as_double<std::uint16_t>(p);
    case PlyType::i32:
      return load_as_double<std::int32_t>(p);
    case PlyType::u32:
      return load_as_double<std::uint32_t>(p);
    case PlyType::f32:
      return load_as_double<float>(p);
    case PlyType::f64:
      return load_as_double<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f64;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

class ByteReader {
 public:
  ByteReader(std::istream& in, const std::filesystem::path& path) : in_(in), path_(path) {}

  double read(PlyType t, const char* what) {
    char buf[8];
    const std::size_t n = ply_size(t);
    if (!in_.read(buf, static_cast<std::streamsize>(n))) fail(path_, 0, std::string("truncated binary data in ") + what);
    return ply_load(t, buf);
  }

 private:
  std::istream& in_;
  const std::filesystem::path& path_;
};

RawData read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, 0, "cannot open file");

  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") fail(path, 1, "missing 'ply' magic");
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  while (true) {
    if (!next_line()) fail(path, line_no, "unterminated header");
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail(path, line_no, "malformed format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else {
        fail(path, line_no, "unsupported PLY format '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "element") {
      long count = 0;
      if (tok.size() != 3 || !parse_long(tok[2], count) || count < 0) fail(path, line_no, "malformed element line");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) fail(path, line_no, "property before any element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = ply_type(tok[2]);
        const auto vt = ply_type(tok[3]);
        if (!ct || !vt) fail(path, line_no, "unknown property type");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *vt;
        prop.name = std::string(tok[4]);
      } else if (tok.size() == 3) {
        const auto t = ply_type(tok[1]);
        if (!t) fail(path, line_no, "unknown property type '" + std::string(tok[1]) + "'");
        prop.type = *t;
        prop.name = std::string(tok[2]);
      } else {
        fail(path, line_no, "malformed property line");
      }
      elements.back().properties.push_back(prop);
    } else {
      fail(path, line_no, "unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_format) fail(path, line_no, "missing format line");

  RawData raw;
  std::vector<long> polygon;
  ByteReader bytes(in, path);
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1, iface = -1;
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      const std::string& n = el.properties[p].name;
      const int ip = static_cast<int>(p);
      if (n == "x") ix = ip;
      if (n == "y") iy = ip;
      if (n == "z") iz = ip;
      if (n == "nx") inx = ip;
      if (n == "ny") iny = ip;
      if (n == "nz") inz = ip;
      if ((n == "vertex_indices" || n == "vertex_index") && el.properties[p].is_list) iface = ip;
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) fail(path, line_no, "vertex element lacks x, y or z");
    const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

    std::vector<double> values(el.properties.size());
    for (std::size_t r = 0; r < el.count; ++r) {
      polygon.clear();
      std::size_t row_line = 0;
      if (binary) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const PlyProperty& prop = el.properties[p];
          if (prop.is_list) {
            const double n = bytes.read(prop.count_type, "list count");
            if (!(n >= 0.0)) fail(path, 0, "negative list length in element '" + el.name + "'");
            for (long k = 0; k < static_cast<long>(n); ++k) {
              const double v = bytes.read(prop.type, "list");
              if (static_cast<int>(p) == iface) polygon.push_back(static_cast<long>(v));
            }
          } else {
            values[p] = bytes.read(prop.type, el.name.c_str());
          }
        }
      } else {
        if (!next_line()) fail(path, line_no + 1, "unexpected end of file in element '" + el.name + "'");
        row_line = line_no;
        const auto tok = split_ws(line);
        std::size_t t = 0;
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const PlyProperty& prop = el.properties[p];
          if (prop.is_list) {
            long n = 0;
            if (t >= tok.size() || !parse_long(tok[t++], n) || n < 0) fail(path, row_line, "malformed list length");
            for (long k = 0; k < n; ++k) {
              long v = 0;
              if (t >= tok.size() || !parse_long(tok[t++], v)) fail(path, row_line, "malformed list entry");
              if (static_cast<int>(p) == iface) polygon.push_back(v);
            }
          } else {
            if (t >= tok.size() || !parse_double(tok[t++], values[p])) {
              fail(path, row_line, "malformed value for property '" + prop.name + "'");
            }
          }
        }
        if (t != tok.size()) fail(path, row_line, "extra values in row");
      }

      if (is_vertex) {
        const Vec3 pos(values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                       values[static_cast<std::size_t>(iz)]);
        if (!pos.allFinite()) {
          ++raw.dropped;
          continue;
        }
        raw.positions.push_back(pos);
        if (has_normals) {
          raw.normals.emplace_back(values[static_cast<std::size_t>(inx)], values[static_cast<std::size_t>(iny)],
                                   values[static_cast<std::size_t>(inz)]);
        }
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const int ip = static_cast<int>(p);
          if (el.properties[p].is_list || ip == ix || ip == iy || ip == iz || ip == inx || ip == iny || ip == inz) continue;
          raw.attributes[el.properties[p].name].push_back(values[p]);
        }
      } else if (is_face && iface >= 0) {
        if (raw.dropped > 0) fail(path, row_line, "faces refer to vertices with non-finite coordinates");
        add_polygon(raw, polygon, path, row_line);
      }
    }
  }
  return raw;
}

void write_ply_header(std::ostream& out, std::size_t vertices, const std::vector<std::string>& vertex_props,
                      std::size_t faces) {
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << vertices << "\n";
  for (const auto& p : vertex_props) out << "property double " << p << "\n";
  if (faces > 0) out << "element face " << faces << "\nproperty list uchar int vertex_indices\n";
  out << "end_header\n";
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

// ---------------------------------------------------------------------------
// OBJ and XYZ

// OBJ index: 1-based, negative counts back from the latest vertex.
long obj_index(std::string_view token, std::size_t vertex_count, const std::filesystem::path& path, std::size_t line) {
  const auto slash = token.find('/');
  long v = 0;
  if (!parse_long(token.substr(0, slash), v) || v == 0) fail(path, line, "malformed face index");
  return v > 0 ? v - 1 : static_cast<long>(vertex_count) + v;
}

RawData read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, 0, "cannot open file");
  RawData raw;
  std::vector<Vec3> vn;
  std::vector<std::vector<long>> faces;
  std::vector<std::size_t> face_lines;
  std::vector<std::vector<long>> face_normals;
  std::vector<double> intensity;
  bool any_color = false;
  std::size_t vertices_seen = 0;
  // OBJ indices count every v line, including dropped ones.
  std::vector<long> remap;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() != 4 && tok.size() != 7) fail(path, line_no, "vertex needs 3 or 6 values");
      double vals[6] = {0, 0, 0, 0, 0, 0};
      for (std::size_t k = 1; k < tok.size(); ++k) {
        if (!parse_double(tok[k], vals[k - 1])) fail(path, line_no, "malformed vertex value");
      }
      ++vertices_seen;
      const Vec3 p(vals[0], vals[1], vals[2]);
      if (!p.allFinite()) {
        ++raw.dropped;
        remap.push_back(-1);
        continue;
      }
      remap.push_back(static_cast<long>(raw.positions.size()));
      raw.positions.push_back(p);
      if (tok.size() == 7) any_color = true;
      intensity.push_back(tok.size() == 7 ? (vals[3] + vals[4] + vals[5]) / 3.0 : 0.0);
    } else if (tok[0] == "vn") {
      if (tok.size() != 4) fail(path, line_no, "normal needs 3 values");
      Vec3 n;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[static_cast<std::size_t>(k + 1)], n[k])) fail(path, line_no, "malformed normal value");
      }
      vn.push_back(n);
    } else if (tok[0] == "f") {
      std::vector<long> ids, nids;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const long v = obj_index(tok[k], vertices_seen, path, line_no);
        if (v < 0 || v >= static_cast<long>(remap.size())) fail(path, line_no, "face index out of range");
        if (remap[static_cast<std::size_t>(v)] < 0) fail(path, line_no, "face refers to a vertex with non-finite coordinates");
        ids.push_back(remap[static_cast<std::size_t>(v)]);
        const auto last = tok[k].rfind('/');
        long n = -1;
        if (last != std::string_view::npos && tok[k].find('/') != last) {
          long raw_n = 0;
          if (parse_long(tok[k].substr(last + 1), raw_n) && raw_n != 0) {
            n = raw_n > 0 ? raw_n - 1 : static_cast<long>(vn.size()) + raw_n;
          }
        }
        nids.push_back(n);
      }
      faces.push_back(std::move(ids));
      face_normals.push_back(std::move(nids));
      face_lines.push_back(line_no);
    }
  }
  for (std::size_t f = 0; f < faces.size(); ++f) add_polygon(raw, faces[f], path, face_lines[f]);

  // Per-vertex normals: the vn referenced by a face corner, else the vn with the same index.
  if (!vn.empty()) {
    std::vector<Vec3> normals(raw.positions.size(), Vec3::Zero());
    std::vector<bool> set(raw.positions.size(), false);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (std::size_t k = 0; k < faces[f].size(); ++k) {
        const long n = face_normals[f][k];
        const auto v = static_cast<std::size_t>(faces[f][k]);
        if (n >= 0 && n < static_cast<long>(vn.size()) && !set[v]) {
          normals[v] = vn[static_cast<std::size_t>(n)];
          set[v] = true;
        }
      }
    }
    const bool all_set = std::all_of(set.begin(), set.end(), [](bool b) { return b; });
    if (all_set) {
      raw.normals = std::move(normals);
    } else if (vn.size() == raw.positions.size()) {
      raw.normals = vn;
    }
  }
  if (any_color) raw.attributes["intensity"] = std::move(intensity);
  return raw;
}

RawData read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, 0, "cannot open file");
  RawData raw;
  std::vector<double> intensity;
  std::size_t columns = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (columns == 0) {
      columns = tok.size();
      if (columns != 3 && columns != 4 && columns != 6) fail(path, line_no, "expected 3, 4 or 6 columns");
    }
    if (tok.size() != columns) fail(path, line_no, "inconsistent column count");
    double vals[6];
    for (std::size_t k = 0; k < columns; ++k) {
      if (!parse_double(tok[k], vals[k])) fail(path, line_no, "malformed number '" + std::string(tok[k]) + "'");
    }
    const Vec3 p(vals[0], vals[1], vals[2]);
    if (!p.allFinite()) {
      ++raw.dropped;
      continue;
    }
    raw.positions.push_back(p);
    if (columns == 4) intensity.push_back(vals[3]);
    if (columns == 6) intensity.push_back((vals[3] + vals[4] + vals[5]) / 3.0 / 255.0);
  }
  if (columns > 3) raw.attributes["intensity"] = std::move(intensity);
  return raw;
}

RawData read_any(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ply") return read_ply(path);
  if (ext == ".obj") return read_obj(path);
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return read_xyz(path);
  fail(path, 0, "unsupported file extension '" + ext + "'");
}

std::ofstream open_for_write(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) fail(path, 0, "cannot open file for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(path, 0, "write failed");
}

}  // namespace

CloudFormat cloud_format_for(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ply") return CloudFormat::ply_binary;
  if (ext == ".obj") return CloudFormat::obj;
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return CloudFormat::xyz;
  throw InvalidArgument("unsupported cloud extension '" + ext + "'");
}

MeshFormat mesh_format_for(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".ply") return MeshFormat::ply;
  throw InvalidArgument("unsupported mesh extension '" + ext + "'");
}

PointCloud read_cloud(const std::filesystem::path& path, ReadReport* report) {
  RawData raw = read_any(path);
  if (report) report->dropped = raw.dropped;
  derive_intensity(raw.attributes);
  for (const auto& [name, values] : raw.attributes) {
    if (values.size() != raw.positions.size()) fail(path, 0, "attribute '" + name + "' does not cover every point");
  }
  return PointCloud(std::move(raw.positions), std::move(raw.attributes));
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
  switch (format) {
    case CloudFormat::ply_ascii:
    case CloudFormat::ply_binary: {
      const bool binary = format == CloudFormat::ply_binary;
      auto out = open_for_write(path, binary);
      out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
      out << "element vertex " << cloud.size() << "\n";
      out << "property double x\nproperty double y\nproperty double z\n";
      for (const auto& [name, values] : cloud.attributes()) out << "property double " << name << "\n";
      out << "end_header\n";
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (binary) {
          for (int a = 0; a < 3; ++a) put(out, cloud[i][a]);
          for (const auto& [name, values] : cloud.attributes()) put(out, values[i]);
        } else {
          out << format_double(cloud[i].x()) << ' ' << format_double(cloud[i].y()) << ' ' << format_double(cloud[i].z());
          for (const auto& [name, values] : cloud.attributes()) out << ' ' << format_double(values[i]);
          out << '\n';
        }
      }
      finish(out, path);
      return;
    }
    case CloudFormat::obj: {
      auto out = open_for_write(path, false);
      for (const Vec3& p : cloud.positions()) {
        out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
      }
      finish(out, path);
      return;
    }
    case CloudFormat::xyz: {
      auto out = open_for_write(path, false);
      const std::vector<double>* intensity = cloud.has_attribute("intensity") ? &cloud.attribute("intensity") : nullptr;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud[i];
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
        if (intensity) out << ' ' << format_double((*intensity)[i]);
        out << '\n';
      }
      finish(out, path);
      return;
    }
  }
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext != ".ply" && ext != ".obj") fail(path, 0, "meshes must be .obj or .ply");
  RawData raw = read_any(path);
  if (raw.dropped > 0 && !raw.triangles.empty()) fail(path, 0, "mesh has vertices with non-finite coordinates");
  TriangleMesh mesh;
  mesh.vertices = std::move(raw.positions);
  if (raw.normals.size() == mesh.vertices.size()) mesh.normals = std::move(raw.normals);
  mesh.triangles = std::move(raw.triangles);
  return mesh;
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  const bool normals = mesh.has_normals();
  if (format == MeshFormat::obj) {
    auto out = open_for_write(path, false);
    for (const Vec3& v : mesh.vertices) {
      out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
    }
    if (normals) {
      for (const Vec3& n : mesh.normals) {
        out << "vn " << format_double(n.x()) << ' ' << format_double(n.y()) << ' ' << format_double(n.z()) << '\n';
      }
    }
    for (const auto& t : mesh.triangles) {
      out << 'f';
      for (int k = 0; k < 3; ++k) {
        out << ' ' << t[k] + 1;
        if (normals) out << "//" << t[k] + 1;
      }
      out << '\n';
    }
    finish(out, path);
    return;
  }
  auto out = open_for_write(path, true);
  std::vector<std::string> props{"x", "y", "z"};
  if (normals) props.insert(props.end(), {"nx", "ny", "nz"});
  write_ply_header(out, mesh.vertices.size(), props, mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    for (int a = 0; a < 3; ++a) put(out, mesh.vertices[i][a]);
    if (normals) {
      for (int a = 0; a < 3; ++a) put(out, mesh.normals[i][a]);
    }
  }
  for (const auto& t : mesh.triangles) {
    put(out, static_cast<std::uint8_t>(3));
    for (int k = 0; k < 3; ++k) put(out, static_cast<std::int32_t>(t[k]));
  }
  finish(out, path);
}

}  // namespace sepmem
