#pragma once

#include "sepmem/common.hpp"

#include <array>
#include <vector>

namespace sepmem {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  // per vertex; empty when absent
  std::vector<std::array<int, 3>> triangles;

  [[nodiscard]] bool has_normals() const { return !normals.empty() && normals.size() == vertices.size(); }
};

/// Every undirected edge is used by exactly two triangles, once in each direction.
bool is_watertight(const TriangleMesh& mesh);

/// V − E + F.
long euler_characteristic(const TriangleMesh& mesh);

double triangle_area(const TriangleMesh& mesh, std::size_t face);

/// Unit normal of a face following its winding; zero for a degenerate face.
Vec3 face_normal(const TriangleMesh& mesh, std::size_t face);

}  // namespace sepmem
