#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hexvessel/error.hpp"
#include "hexvessel/geometry_io.hpp"
#include "hexvessel/parallel.hpp"
#include "hexvessel/quality.hpp"
#include "hexvessel/tree.hpp"
#include "hexvessel/vtk_io.hpp"

namespace fs = std::filesystem;
using namespace hexvessel;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitMeshing = 3;

struct MeshFlags {
  std::optional<int> sections, cells, degree, points_per_side;
  std::optional<double> alpha;
  std::optional<std::string> blend;
  std::string sj_variant = "corner";
};

void add_mesh_flags(CLI::App* cmd, MeshFlags& f) {
  cmd->add_option("--sections", f.sections, "Sections per branch (default: from geometry, else automatic)")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--cells", f.cells, "Cells per patch side in each section, even (default 10)")
      ->check(CLI::Range(2, 512));
  cmd->add_option("--degree", f.degree, "Disc template spline degree (default 3)")->check(CLI::Range(2, 7));
  cmd->add_option("--points-per-side", f.points_per_side, "Template control points per patch side (default 6)")
      ->check(CLI::Range(4, 64));
  cmd->add_option("--alpha", f.alpha, "Boundary-layer parameter in [0,1) (default 0, no layer)")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--blend", f.blend, "Junction blend: hermite or linear (default hermite)")
      ->check(CLI::IsMember({"hermite", "linear"}));
}

void add_variant_flag(CLI::App* cmd, std::string& variant) {
  cmd->add_option("--sj-variant", variant, "Scaled Jacobian variant: corner (default) or literal")
      ->check(CLI::IsMember({"corner", "literal"}));
}

void apply(const MeshFlags& f, MeshOptions& o) {
  if (f.sections) o.sections = *f.sections;
  if (f.cells) {
    if (*f.cells % 2) throw ParameterError("--cells must be even");
    o.cells_per_side = *f.cells;
  }
  if (f.degree) o.disc.degree = *f.degree;
  if (f.points_per_side) o.disc.points_per_side = *f.points_per_side;
  if (f.alpha) o.boundary_layer_alpha = *f.alpha;
  if (f.blend) o.mode = *f.blend == "linear" ? BlendMode::Linear : BlendMode::Hermite;
}

SjVariant variant_of(const std::string& s) {
  return s == "literal" ? SjVariant::PaperLiteral : SjVariant::CornerNormalized;
}

std::vector<int> cell_range(const BlockInfo& b) {
  std::vector<int> cells(b.num_cells);
  for (std::size_t i = 0; i < b.num_cells; ++i) cells[i] = static_cast<int>(b.first_cell + i);
  return cells;
}

void print_block_table(const TreeMesh& tm, const QualityReport& full) {
  if (tm.blocks.size() < 2) return;
  std::vector<int> branch_cells, junction_cells;
  for (const auto& b : tm.blocks) {
    auto cells = cell_range(b);
    auto& dst = b.kind == BlockInfo::Kind::Branch ? branch_cells : junction_cells;
    dst.insert(dst.end(), cells.begin(), cells.end());
  }
  std::printf("\nper region\n");
  if (!branch_cells.empty()) std::cout << format_summary(subset(full, branch_cells), "branches");
  if (!junction_cells.empty()) std::cout << format_summary(subset(full, junction_cells), "junctions");
  for (const auto& b : tm.blocks)
    if (b.kind == BlockInfo::Kind::Junction)
      std::printf("junction %s: axis kink %.1f deg\n", b.id.c_str(), b.axis_kink * 180.0 / kPi);
}

void write_mesh(const TreeMesh& tm, const QualityReport& rep, const fs::path& out, const fs::path& csv) {
  write_vtk(tm.mesh, out, {{"scaled_jacobian", rep.sj}, {"equiangular_skewness", rep.nes}});
  write_quality_csv(rep, csv);
}

int generate(const GeometryInput& geom, const fs::path& out, std::optional<fs::path> csv, SjVariant variant) {
  const TreeMesh tm = assemble_tree(geom.branches, geom.junctions, geom.options);
  for (const auto& w : tm.warnings) std::cerr << "warning: " << w << "\n";
  const QualityReport rep = report(tm.mesh, variant);
  const fs::path csv_path = csv ? *csv : fs::path(out).replace_extension(".csv");
  write_mesh(tm, rep, out, csv_path);
  std::printf("%zu vertices, %zu cells, %zu blocks\n", tm.mesh.num_vertices(), tm.mesh.num_cells(), tm.blocks.size());
  std::cout << format_summary(rep, out.stem().string());
  print_block_table(tm, rep);
  return 0;
}

std::vector<RadiusTarget> parse_targets(const std::vector<std::string>& specs) {
  std::vector<RadiusTarget> targets;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ParameterError("--target expects t:radius, got '" + s + "'");
    try {
      targets.push_back({std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw ParameterError("--target expects t:radius, got '" + s + "'");
    }
  }
  return targets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured hexahedral meshes of vessel trees"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker threads (default: HEXVESSEL_THREADS, else all cores)")
      ->check(CLI::Range(1, 4096));

  std::string input, output;
  std::optional<std::string> csv;
  MeshFlags flags;

  auto* gen = app.add_subcommand("generate", "Mesh a geometry file and report quality");
  gen->add_option("--input,-i", input, "Geometry JSON")->required();
  gen->add_option("--output,-o", output, "Output VTK mesh")->required();
  gen->add_option("--csv", csv, "Per-cell quality CSV (default: output with .csv extension)");
  add_mesh_flags(gen, flags);
  add_variant_flag(gen, flags.sj_variant);

  std::string branch;
  double t_start = 0, t_end = 1;
  std::vector<std::string> target_specs;
  std::optional<std::string> mesh_out;
  auto* edit = app.add_subcommand("edit", "Change a branch radius over a parameter interval");
  edit->add_option("--input,-i", input, "Geometry JSON")->required();
  edit->add_option("--output,-o", output, "Edited geometry JSON")->required();
  edit->add_option("--branch", branch, "Branch id")->required();
  edit->add_option("--t-start", t_start, "Start of the edited interval")->required();
  edit->add_option("--t-end", t_end, "End of the edited interval")->required();
  edit->add_option("--target", target_specs, "Target radius as t:radius (repeatable)");
  edit->add_option("--mesh", mesh_out, "Also mesh the edited geometry to this VTK file");
  add_mesh_flags(edit, flags);
  add_variant_flag(edit, flags.sj_variant);

  auto* qual = app.add_subcommand("quality", "Report SJ and NES of a VTK hexahedral mesh");
  qual->add_option("--input,-i", input, "VTK mesh")->required();
  qual->add_option("--csv", csv, "Per-cell quality CSV");
  add_variant_flag(qual, flags.sj_variant);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    configure_threads(threads);
    const SjVariant variant = variant_of(flags.sj_variant);
    if (*gen) {
      GeometryInput geom = read_geometry(input);
      apply(flags, geom.options);
      return generate(geom, output, csv ? std::optional<fs::path>(*csv) : std::nullopt, variant);
    }
    if (*edit) {
      GeometryInput geom = read_geometry(input);
      apply(flags, geom.options);
      const auto targets = parse_targets(target_specs);
      bool found = false;
      for (auto& b : geom.branches)
        if (b.id == branch) {
          b = edit_radius(b, t_start, t_end, targets);
          found = true;
        }
      if (!found) throw ParameterError("unknown branch id '" + branch + "'");
      write_geometry(geom, output);
      std::printf("wrote %s\n", output.c_str());
      if (mesh_out) return generate(geom, *mesh_out, std::nullopt, variant);
      return 0;
    }
    if (*qual) {
      const VtkData data = read_vtk(input);
      if (data.mesh.num_cells() == 0) throw SchemaError("mesh has no cells");
      const QualityReport rep = report(data.mesh, variant);
      if (csv) write_quality_csv(rep, *csv);
      std::cout << format_summary(rep, fs::path(input).stem().string());
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const MeshingError& e) {
    std::cerr << "meshing failed: " << e.what() << "\n";
    return kExitMeshing;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
