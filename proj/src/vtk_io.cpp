#include "hexvessel/vtk_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hexvessel/error.hpp"

namespace hexvessel {

std::string vtk_text(const HexMesh& mesh, const std::vector<CellArray>& cell_data) {
  if (mesh.vertices.empty() || mesh.hexes.empty()) throw ParameterError("vtk: refusing to write an empty mesh");
  mesh.validate();
  for (const auto& a : cell_data)
    if (a.values.size() != mesh.num_cells()) throw ParameterError("vtk: cell array '" + a.name + "' has wrong length");

  std::string out;
  out.reserve(mesh.num_vertices() * 72 + mesh.num_cells() * 64);
  char buf[160];
  out += "# vtk DataFile Version 3.0\nhexvessel mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  std::snprintf(buf, sizeof buf, "POINTS %zu double\n", mesh.num_vertices());
  out += buf;
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "CELLS %zu %zu\n", mesh.num_cells(), mesh.num_cells() * 9);
  out += buf;
  for (const auto& h : mesh.hexes) {
    std::snprintf(buf, sizeof buf, "8 %d %d %d %d %d %d %d %d\n", h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "CELL_TYPES %zu\n", mesh.num_cells());
  out += buf;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out += "12\n";
  if (!cell_data.empty()) {
    std::snprintf(buf, sizeof buf, "CELL_DATA %zu\n", mesh.num_cells());
    out += buf;
    for (const auto& a : cell_data) {
      out += "SCALARS " + a.name + " double 1\nLOOKUP_TABLE default\n";
      for (double v : a.values) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out += buf;
      }
    }
  }
  if (!mesh.tags.empty()) {
    std::snprintf(buf, sizeof buf, "POINT_DATA %zu\n", mesh.num_vertices());
    out += buf;
    out += "SCALARS boundary_tag int 1\nLOOKUP_TABLE default\n";
    for (auto t : mesh.tags) {
      out += std::to_string(static_cast<int>(t));
      out += '\n';
    }
  }
  return out;
}

void write_vtk(const HexMesh& mesh, const std::filesystem::path& path, const std::vector<CellArray>& cell_data) {
  const std::string text = vtk_text(mesh, cell_data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::filesystem::filesystem_error("cannot open for writing", path,
                                                    std::make_error_code(std::errc::io_error));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::filesystem::filesystem_error("write failed", path,
                                                    std::make_error_code(std::errc::io_error));
}

namespace {

class Tokens {
public:
  explicit Tokens(const std::string& text) : text_(text) {}

  bool done() {
    skip();
    return pos_ >= text_.size();
  }

  std::string_view next() {
    skip();
    if (pos_ >= text_.size()) throw SchemaError("vtk: unexpected end of file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string_view(text_).substr(start, pos_ - start);
  }

  template <class T>
  T number() {
    const auto tok = next();
    T v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw SchemaError("vtk: expected a number, found '" + std::string(tok) + "'");
    return v;
  }

  void expect(std::string_view word) {
    const auto tok = next();
    if (tok != word) throw SchemaError("vtk: expected '" + std::string(word) + "', found '" + std::string(tok) + "'");
  }

  std::string line() {
    const std::size_t end = text_.find('\n', pos_);
    std::string s = text_.substr(pos_, end == std::string::npos ? std::string::npos : end - pos_);
    pos_ = end == std::string::npos ? text_.size() : end + 1;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

VtkData parse_vtk(const std::string& text) {
  Tokens tok(text);
  const std::string magic = tok.line();
  if (magic.rfind("# vtk DataFile", 0) != 0) throw SchemaError("vtk: missing '# vtk DataFile' header");
  tok.line();  // title
  if (tok.line().find("ASCII") == std::string::npos) throw SchemaError("vtk: only ASCII files are supported");
  tok.expect("DATASET");
  tok.expect("UNSTRUCTURED_GRID");

  VtkData data;
  HexMesh& mesh = data.mesh;
  std::size_t ncells = 0;
  enum class Section { None, Cells, Points } section = Section::None;
  std::size_t section_size = 0;
  while (!tok.done()) {
    const std::string key(tok.next());
    if (key == "POINTS") {
      const auto n = tok.number<std::size_t>();
      tok.next();  // scalar type
      mesh.vertices.resize(n);
      for (auto& p : mesh.vertices) {
        const double x = tok.number<double>(), y = tok.number<double>(), z = tok.number<double>();
        p = Vec3(x, y, z);
      }
    } else if (key == "CELLS") {
      ncells = tok.number<std::size_t>();
      tok.number<std::size_t>();
      mesh.hexes.resize(ncells);
      for (auto& h : mesh.hexes) {
        if (tok.number<int>() != 8) throw SchemaError("vtk: only hexahedral cells are supported");
        for (int& v : h) v = tok.number<int>();
      }
    } else if (key == "CELL_TYPES") {
      const auto n = tok.number<std::size_t>();
      for (std::size_t i = 0; i < n; ++i)
        if (tok.number<int>() != 12) throw SchemaError("vtk: only hexahedral cells (type 12) are supported");
    } else if (key == "CELL_DATA" || key == "POINT_DATA") {
      section = key == "CELL_DATA" ? Section::Cells : Section::Points;
      section_size = tok.number<std::size_t>();
    } else if (key == "SCALARS") {
      if (section == Section::None) throw SchemaError("vtk: SCALARS outside a data section");
      const std::string name(tok.next());
      tok.next();  // type
      if (tok.next() != "LOOKUP_TABLE") {
        tok.expect("LOOKUP_TABLE");
      }
      tok.next();
      std::vector<double> values(section_size);
      for (auto& v : values) v = tok.number<double>();
      if (section == Section::Cells) {
        data.cell_data.push_back({name, std::move(values)});
      } else if (name == "boundary_tag") {
        mesh.tags.resize(section_size);
        for (std::size_t i = 0; i < section_size; ++i)
          mesh.tags[i] = static_cast<BoundaryTag>(static_cast<int>(values[i]));
      }
    } else {
      throw SchemaError("vtk: unsupported section '" + key + "'");
    }
  }
  try {
    mesh.validate();
  } catch (const ParameterError& e) {
    throw SchemaError(std::string("vtk: ") + e.what());
  }
  return data;
}

VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot open", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_vtk(ss.str());
}

}  // namespace hexvessel
