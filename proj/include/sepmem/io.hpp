#pragma once

#include "sepmem/geometry.hpp"
#include "sepmem/mesh.hpp"

#include <filesystem>

namespace sepmem {

enum class CloudFormat { ply_ascii, ply_binary, obj, xyz };
enum class MeshFormat { obj, ply };

/// Picks a format from the file extension (.ply writes binary).
CloudFormat cloud_format_for(const std::filesystem::path& path);
MeshFormat mesh_format_for(const std::filesystem::path& path);

struct ReadReport {
  std::size_t dropped = 0;  // rows with non-finite coordinates
};

/// Reads PLY (ascii or binary little-endian), OBJ vertices, or XYZ.
///
/// red/green/blue become "intensity" = (r + g + b)/3/255 unless the file has an
/// explicit intensity; other scalar vertex properties keep their names.
/// Rows with non-finite coordinates are skipped and counted.
PointCloud read_cloud(const std::filesystem::path& path, ReadReport* report = nullptr);

/// Writes positions and every attribute channel (XYZ keeps only intensity).
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);

/// Reads vertices, optional vertex normals and triangles from OBJ or PLY.
/// Polygons are fan-triangulated; a file without faces yields no triangles.
TriangleMesh read_mesh(const std::filesystem::path& path);

/// OBJ (1-based v/vn/f lines) or binary PLY; normals are written when present.
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);

}  // namespace sepmem
