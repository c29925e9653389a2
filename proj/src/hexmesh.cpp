#include "hexvessel/hexmesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "hexvessel/error.hpp"

namespace hexvessel {

void HexMesh::validate() const {
  const auto n = static_cast<long>(vertices.size());
  for (std::size_t c = 0; c < hexes.size(); ++c)
    for (int v : hexes[c])
      if (v < 0 || v >= n) {
        std::ostringstream os;
        os << "hex " << c << " references vertex " << v << " outside [0, " << n << ")";
        throw ParameterError(os.str());
      }
  if (!tags.empty() && tags.size() != vertices.size())
    throw ParameterError("boundary tag count does not match the vertex count");
}

std::array<Vec3, 8> HexMesh::cell(std::size_t c) const {
  std::array<Vec3, 8> out;
  for (int k = 0; k < 8; ++k) out[k] = vertices[hexes[c][k]];
  return out;
}

namespace {

struct CellKey {
  long x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

}  // namespace

WeldResult weld(std::span<const HexMesh> blocks, double tolerance) {
  if (!(tolerance > 0)) throw ParameterError("weld: tolerance must be positive");
  const double cell = 2.0 * tolerance;
  auto key_of = [&](const Vec3& p) {
    return CellKey{static_cast<long>(std::floor(p.x() / cell)), static_cast<long>(std::floor(p.y() / cell)),
                   static_cast<long>(std::floor(p.z() / cell))};
  };
  std::unordered_map<CellKey, std::vector<int>, CellKeyHash> grid;
  WeldResult out;
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.vertices.size();
  grid.reserve(total);
  out.mesh.vertices.reserve(total);

  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const HexMesh& block = blocks[bi];
    block.validate();
    std::vector<int> map(block.vertices.size());
    for (std::size_t vi = 0; vi < block.vertices.size(); ++vi) {
      const Vec3& p = block.vertices[vi];
      const CellKey k = key_of(p);
      int found = -1;
      for (long dx = -1; dx <= 1; ++dx)
        for (long dy = -1; dy <= 1; ++dy)
          for (long dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
            if (it == grid.end()) continue;
            for (int g : it->second) {
              if ((out.mesh.vertices[g] - p).norm() > tolerance) continue;
              if (found >= 0 && found != g) {
                std::ostringstream os;
                os << "weld: vertex " << vi << " of block " << bi << " has two partners within tolerance "
                   << tolerance;
                throw ConformalityError(os.str());
              }
              found = g;
            }
          }
      if (found < 0) {
        found = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(p);
        grid[k].push_back(found);
      }
      map[vi] = found;
    }
    for (const auto& h : block.hexes) {
      std::array<int, 8> g;
      for (int k = 0; k < 8; ++k) g[k] = map[h[k]];
      out.mesh.hexes.push_back(g);
    }
    out.vertex_map.push_back(std::move(map));
  }
  return out;
}

namespace {

struct FaceRecord {
  std::array<int, 4> key;
  std::array<int, 4> face;
};

std::vector<FaceRecord> sorted_faces(const HexMesh& mesh) {
  std::vector<FaceRecord> faces;
  faces.reserve(mesh.hexes.size() * 6);
  for (const auto& h : mesh.hexes)
    for (const auto& f : kHexFaces) {
      FaceRecord r;
      for (int k = 0; k < 4; ++k) r.face[k] = h[f[k]];
      r.key = r.face;
      std::sort(r.key.begin(), r.key.end());
      faces.push_back(r);
    }
  std::sort(faces.begin(), faces.end(), [](const FaceRecord& a, const FaceRecord& b) { return a.key < b.key; });
  return faces;
}

template <class F>
void for_each_face_group(const std::vector<FaceRecord>& faces, F&& f) {
  std::size_t i = 0;
  while (i < faces.size()) {
    std::size_t j = i + 1;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    f(faces[i], j - i);
    i = j;
  }
}

}  // namespace

FaceCensus face_census(const HexMesh& mesh) {
  FaceCensus census;
  for_each_face_group(sorted_faces(mesh), [&](const FaceRecord&, std::size_t count) {
    if (count == 1) ++census.boundary;
    else if (count == 2) ++census.interior;
    else ++census.nonmanifold;
  });
  return census;
}

std::vector<std::array<int, 4>> boundary_faces(const HexMesh& mesh) {
  std::vector<std::array<int, 4>> out;
  for_each_face_group(sorted_faces(mesh), [&](const FaceRecord& r, std::size_t count) {
    if (count == 1) out.push_back(r.face);
  });
  return out;
}

void tag_boundary(HexMesh& mesh, std::span<const int> inlet_vertices, std::span<const int> outlet_vertices) {
  mesh.tags.assign(mesh.vertices.size(), BoundaryTag::Interior);
  for (const auto& f : boundary_faces(mesh))
    for (int v : f) mesh.tags[v] = BoundaryTag::Wall;
  for (int v : inlet_vertices) mesh.tags.at(v) = BoundaryTag::Inlet;
  for (int v : outlet_vertices) mesh.tags.at(v) = BoundaryTag::Outlet;
}

}  // namespace hexvessel
