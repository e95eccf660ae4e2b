#include "sepmem/mesh.hpp"

#include <map>
#include <set>
#include <utility>

namespace sepmem {

bool is_watertight(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return false;
  std::map<std::pair<int, int>, int> directed;
  const int n = static_cast<int>(mesh.vertices.size());
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      if (a < 0 || a >= n || b < 0 || b >= n || a == b) return false;
      if (++directed[{a, b}] > 1) return false;
    }
  }
  for (const auto& [edge, count] : directed) {
    const auto it = directed.find({edge.second, edge.first});
    if (it == directed.end() || it->second != count) return false;
  }
  return true;
}

long euler_characteristic(const TriangleMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  std::set<int> used;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e];
      const int b = t[(e + 1) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
      used.insert(a);
    }
  }
  return static_cast<long>(used.size()) - static_cast<long>(edges.size()) + static_cast<long>(mesh.triangles.size());
}

double triangle_area(const TriangleMesh& mesh, std::size_t face) {
  const auto& t = mesh.triangles.at(face);
  const Vec3& a = mesh.vertices.at(static_cast<std::size_t>(t[0]));
  const Vec3& b = mesh.vertices.at(static_cast<std::size_t>(t[1]));
  const Vec3& c = mesh.vertices.at(static_cast<std::size_t>(t[2]));
  return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 face_normal(const TriangleMesh& mesh, std::size_t face) {
  const auto& t = mesh.triangles.at(face);
  const Vec3& a = mesh.vertices.at(static_cast<std::size_t>(t[0]));
  const Vec3& b = mesh.vertices.at(static_cast<std::size_t>(t[1]));
  const Vec3& c = mesh.vertices.at(static_cast<std::size_t>(t[2]));
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3(Vec3::Zero());
}

}  // namespace sepmem
