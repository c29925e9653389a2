#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hexvessel/vec.hpp"

namespace hexvessel {

enum class BoundaryTag : std::uint8_t { Interior = 0, Wall = 1, Inlet = 2, Outlet = 3 };

/// Vertices plus hexahedra in VTK order (bottom face 0-3 counter-clockwise
/// seen from the top face, then top face 4-7).
struct HexMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 8>> hexes;
  std::vector<BoundaryTag> tags;  // per vertex; empty until tagged

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return hexes.size(); }

  /// Throws ParameterError on out-of-range indices.
  void validate() const;

  std::array<Vec3, 8> cell(std::size_t c) const;
};

struct WeldResult {
  HexMesh mesh;
  /// For each input block, the global index of each of its vertices.
  std::vector<std::vector<int>> vertex_map;
};

/// Merges blocks, identifying vertices closer than `tolerance`. Two distinct
/// candidates within tolerance of one vertex raise ConformalityError.
WeldResult weld(std::span<const HexMesh> blocks, double tolerance);

struct FaceCensus {
  std::size_t interior = 0;     // shared by exactly two cells
  std::size_t boundary = 0;     // owned by one cell
  std::size_t nonmanifold = 0;  // shared by three or more
};

FaceCensus face_census(const HexMesh& mesh);

/// Quadrilateral faces owned by exactly one cell, as vertex quadruples.
std::vector<std::array<int, 4>> boundary_faces(const HexMesh& mesh);

/// Tags vertices on boundary faces as wall, then overrides the given cap
/// vertex sets with inlet/outlet.
void tag_boundary(HexMesh& mesh, std::span<const int> inlet_vertices, std::span<const int> outlet_vertices);

/// Hex faces in VTK local numbering, outward-oriented for a positive cell.
inline constexpr std::array<std::array<int, 4>, 6> kHexFaces = {{
    {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7},
}};

}  // namespace hexvessel
