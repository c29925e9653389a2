#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hexvessel/hexmesh.hpp"

namespace hexvessel {

struct CellArray {
  std::string name;
  std::vector<double> values;
};

/// Legacy ASCII unstructured grid of hexahedra. Coordinates use 17
/// significant digits; output is a pure function of the inputs.
void write_vtk(const HexMesh& mesh, const std::filesystem::path& path, const std::vector<CellArray>& cell_data = {});
std::string vtk_text(const HexMesh& mesh, const std::vector<CellArray>& cell_data = {});

struct VtkData {
  HexMesh mesh;
  std::vector<CellArray> cell_data;
};

/// Reads the subset written by write_vtk (hexahedra only). Throws
/// SchemaError on malformed or unsupported input.
VtkData read_vtk(const std::filesystem::path& path);
VtkData parse_vtk(const std::string& text);

}  // namespace hexvessel
