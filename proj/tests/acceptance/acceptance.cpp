// Acceptance criteria: one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "hexvessel/disc.hpp"
#include "hexvessel/error.hpp"
#include "hexvessel/geometry_io.hpp"
#include "hexvessel/junction.hpp"
#include "hexvessel/parallel.hpp"
#include "hexvessel/quality.hpp"
#include "hexvessel/tree.hpp"
#include "hexvessel/vtk_io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hexvessel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %2d %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Generated {
  TreeMesh tree;
  QualityReport report;
  double seconds = 0.0;
};

Generated generate(const std::string& file) {
  const auto start = std::chrono::steady_clock::now();
  const GeometryInput g = read_geometry(testing::data_path(file));
  Generated out;
  out.tree = assemble_tree(g.branches, g.junctions, g.options);
  out.report = report(out.tree.mesh);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<int> cells_of(const TreeMesh& t, BlockInfo::Kind kind) {
  std::vector<int> cells;
  for (const auto& b : t.blocks)
    if (b.kind == kind)
      for (std::size_t c = b.first_cell; c < b.first_cell + b.num_cells; ++c) cells.push_back(static_cast<int>(c));
  return cells;
}

const DiscTemplate& disc() {
  static const DiscTemplate d = build_disc_template();
  return d;
}

Outcome cylinder_benchmark() {
  const Generated coarse = generate("cylinder.json");
  const Generated medium = generate("cylinder_medium.json");
  const auto& c = coarse.report.sj_stats;
  const bool ok = c.min >= 0.80 && c.mean >= 0.96 && c.max >= 0.995 && coarse.seconds < 10.0 &&
                  medium.report.sj_stats.min >= 0.74 && medium.seconds < 90.0;
  return {ok, fmt("coarse %zu vertices SJ %.3f/%.3f/%.3f in %.2f s; medium %zu vertices SJ_min %.3f in %.2f s",
                  coarse.tree.mesh.num_vertices(), c.min, c.mean, c.max, coarse.seconds,
                  medium.tree.mesh.num_vertices(), medium.report.sj_stats.min, medium.seconds)};
}

Outcome validity_suite() {
  const char* files[] = {"straight_tube.json", "curved_tube.json",  "stenosed_tube.json",
                         "aneurysm_1.json",    "aneurysm_2.json",   "aneurysm_3.json",
                         "planar_y.json",      "nonplanar_bifurcation.json", "star5.json", "tree3.json"};
  bool ok = true;
  double sj_min = 1.0, nes_max = 0.0;
  std::string worst;
  for (const char* f : files) {
    const Generated g = generate(f);
    ok = ok && g.report.sj_stats.min > 0.0 && g.report.nes_stats.max < 1.0;
    if (g.report.sj_stats.min < sj_min) {
      sj_min = g.report.sj_stats.min;
      worst = f;
    }
    nes_max = std::max(nes_max, g.report.nes_stats.max);
  }
  return {ok, fmt("10 meshes; lowest SJ_min %.3f (%s), highest NES_max %.3f", sj_min, worst.c_str(), nes_max)};
}

Outcome trend_properties() {
  const Generated tree = generate("tree3.json");
  const double branch = subset(tree.report, cells_of(tree.tree, BlockInfo::Kind::Branch)).sj_stats.min;
  const double junction = subset(tree.report, cells_of(tree.tree, BlockInfo::Kind::Junction)).sj_stats.min;
  double sweep[3];
  for (int k = 0; k < 3; ++k) sweep[k] = generate("aneurysm_" + std::to_string(k + 1) + ".json").report.sj_stats.min;
  const bool ok = junction < branch && sweep[0] > sweep[1] && sweep[1] > sweep[2];
  return {ok, fmt("tree junction %.3f < branch %.3f; aneurysm sweep %.3f > %.3f > %.3f", junction, branch, sweep[0],
                  sweep[1], sweep[2])};
}

double cp_distance(const SectionMap& s, const std::function<Vec2(const Vec2&)>& f, const SectionMap& base) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.control_points().size(); ++i)
    worst = std::max(worst, (s.control_points()[i] - f(base.control_points()[i])).norm());
  return worst;
}

Outcome harmonic_map() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  double affine = 0.0, equivariance = 0.0;
  const auto circle = BoundaryCorrespondence::unit_circle();
  for (int k = 0; k < 10; ++k) {
    Eigen::Matrix2d l;
    do {
      l << 1 + u(rng), u(rng), u(rng), 1 + u(rng);
    } while (l.determinant() <= 0.2);
    const Vec2 c(2 * u(rng), 2 * u(rng));
    const auto map = [&](const Vec2& p) -> Vec2 { return l * p + c; };
    affine = std::max(affine, cp_distance(harmonic_section(disc(), circle.transformed(l, c)), map, disc().map()));
    const auto f = BoundaryCorrespondence::from_samples(oracles::random_convex(rng, 32));
    equivariance = std::max(equivariance, cp_distance(harmonic_section(disc(), f.transformed(l, c)), map,
                                                      harmonic_section(disc(), f)));
  }
  int outside = 0;
  std::uniform_real_distribution<double> unit(0, 1);
  for (int k = 0; k < 20; ++k) {
    const SectionMap s = harmonic_section(disc(), BoundaryCorrespondence::from_samples(oracles::random_convex(rng, 24 + k)));
    const auto hull = oracles::convex_hull(s.boundary_control_points());
    for (int i = 0; i < 10000; ++i)
      if (!oracles::inside_convex(hull, s.eval(i % 5, unit(rng), unit(rng)), 1e-10)) ++outside;
  }
  const bool ok = affine <= 1e-9 && equivariance <= 1e-9 && outside == 0;
  return {ok, fmt("affine reproduction %.1e, equivariance %.1e, %d of 200000 samples outside the hull", affine,
                  equivariance, outside)};
}

Outcome rotation_minimizing_frames_check() {
  const oracles::Helix h;
  const double a_end = 4 * kPi;
  const Vec3 r0 = Frame::from_tangent_normal(h.tangent(0), Vec3(1, 0, 0)).normal;
  const auto frames = oracles::discrete(h, a_end, 100, r0);
  const double deviation = oracles::max_deviation(frames, oracles::ode_normals(h, r0, a_end, 100, 2000));
  double ortho = 0.0;
  for (const auto& f : frames) ortho = std::max(ortho, f.orthonormality_error());
  std::vector<Vec3> c, t;
  for (int i = 0; i < 30; ++i) {
    c.emplace_back(0.2 * i, -0.1 * i, 0.7 * i);
    t.push_back(Vec3(0.2, -0.1, 0.7).normalized());
  }
  const Frame f0 = Frame::from_tangent_normal(t[0], Vec3(0, 1, 0));
  bool straight = true;
  for (const auto& f : rotation_minimizing_frames(c, t, f0)) straight = straight && f.normal == f0.normal && f.binormal == f0.binormal;
  const bool ok = deviation <= 1e-3 && ortho <= 1e-10 && straight;
  return {ok, fmt("helix deviation %.2e rad, orthonormality %.1e, straight line %s", deviation, ortho,
                  straight ? "exact" : "drifts")};
}

Outcome boundary_layer_identities() {
  double worst = 0.0;
  bool monotone = true;
  for (int k = 1; k <= 9; ++k) {
    const double a = k / 10.0;
    worst = std::max({worst, std::abs(boundary_layer_profile(0.0, a)), std::abs(boundary_layer_profile(1.0, a) - 1.0)});
    // The profile is quadratic, so the central difference is exact up to rounding.
    const double h = 1e-3;
    const double d = (boundary_layer_profile(1 + h, a) - boundary_layer_profile(1 - h, a)) / (2 * h);
    worst = std::max(worst, std::abs(d - (1 - a)) * h);
  }
  // Radial position of interior template points increases with alpha.
  std::vector<DiscTemplate> layers;
  for (double a : {0.0, 0.3, 0.6, 0.9}) layers.push_back(apply_boundary_layer(disc(), a, false));
  for (std::size_t k = 1; k < layers.size(); ++k)
    for (int d : disc().layout().interior_dofs)
      monotone = monotone && layers[k].map().control_points()[d].norm() >= layers[k - 1].map().control_points()[d].norm();
  const bool ok = worst <= 1e-15 && monotone;
  return {ok, fmt("largest identity residual %.1e, radial monotonicity %s", worst, monotone ? "holds" : "violated")};
}

std::vector<EndSection> fan_sections(int nb, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  const Vec3 d_in(0, 1, 0);
  EndSeed inlet{-2.5 * d_in, d_in, EndRole::Inlet, scale_disc(disc(), 0.8)};
  std::vector<EndSeed> outlets;
  for (int k = 1; k < nb; ++k) {
    const double phi = -kPi / 2 + 2 * kPi * k / nb + jitter(rng);
    const Vec3 d = Vec3(std::cos(phi), std::sin(phi), (k % 2 ? 0.2 : -0.2) + jitter(rng)).normalized();
    outlets.push_back({2.5 * d, d, EndRole::Outlet, scale_disc(disc(), 0.8)});
  }
  return orient_sections(inlet, outlets, Vec3::UnitZ());
}

Outcome junction_structure() {
  std::mt19937_64 rng(7);
  const auto sampling = SectionSampling::build(disc().layout(), 6);
  bool counts = true;
  double collinear = 0.0, slices = 0.0;
  for (int nb = 2; nb <= 8; ++nb) {
    std::vector<EndSection> sections;
    if (nb == 2) {
      EndSeed in{Vec3(0, 0, -2), Vec3::UnitZ(), EndRole::Inlet, scale_disc(disc(), 1.0)};
      std::vector<EndSeed> out = {{Vec3(0, 0, 2), Vec3::UnitZ(), EndRole::Outlet, scale_disc(disc(), 1.0)}};
      sections = orient_sections(in, out, Vec3::UnitX());
    } else {
      sections = fan_sections(nb, rng);
    }
    const JunctionMesh jm = mesh_junction(sections, disc(), *sampling);
    counts = counts && jm.skeleton.num_curves() == 4 * nb && jm.butterfly.num_quadrants() == 2 * nb;
    const Vec3 a = jm.skeleton.x_top - jm.skeleton.x_center, b = jm.skeleton.x_bottom - jm.skeleton.x_center;
    collinear = std::max(collinear, a.cross(b).norm() / std::max(a.norm(), b.norm()));
    const auto template_points = sampling->sample(disc().map());
    for (int k = 0; k < nb; ++k) {
      const auto& s = jm.skeleton.sections[k];
      const auto local = sampling->sample(s.section);
      for (std::size_t i = 0; i < local.size(); ++i) {
        const Vec2 w(template_points[i].x(), s.sign() * template_points[i].y());
        slices = std::max({slices, (jm.blends[k].eval(i, 0.0) - s.lift(local[i])).norm(),
                           (jm.blends[k].eval(i, 1.0) - jm.butterfly.half_point(k, w)).norm()});
      }
    }
  }
  const auto [branches, junctions] = testing::planar_y();
  MeshOptions o;
  o.cells_per_side = 6;
  const TreeMesh y = assemble_tree(branches, junctions, o);
  const double mirror = testing::vertex_set_distance(y.mesh, y.mesh, [](const Vec3& p) { return Vec3(-p.x(), p.y(), p.z()); }, 0.05);
  const bool ok = counts && collinear <= 1e-9 && slices <= 1e-10 && mirror <= 1e-8;
  return {ok, fmt("counts %s for n_b=2..8, collinearity %.1e, slice error %.1e, planar-Y symmetry %.1e",
                  counts ? "4n_b/2n_b" : "wrong", collinear, slices, mirror)};
}

Outcome topology_invariance() {
  // Sampling parameters are fixed; automatic section counts follow the mean radius.
  GeometryInput g = read_geometry(testing::data_path("stenosed_tube.json"));
  g.options.sections = 60;
  const TreeMesh base = assemble_tree(g.branches, g.junctions, g.options);
  const std::string reference = [&] {
    const std::string t = vtk_text(base.mesh);
    return t.substr(t.find("CELLS "));
  }();
  int identical = 0, moved = 0;
  const std::vector<std::vector<RadiusTarget>> edits = {{{0.5, 1.2}}, {{0.4, 2.0}, {0.6, 2.2}}, {{0.5, 0.5}}};
  for (const auto& targets : edits) {
    GeometryInput e = g;
    e.branches[0] = edit_radius(g.branches[0], 0.3, 0.7, targets);
    const TreeMesh m = assemble_tree(e.branches, e.junctions, e.options);
    const std::string t = vtk_text(m.mesh);
    identical += t.substr(t.find("CELLS ")) == reference;
    moved += m.mesh.vertices != base.mesh.vertices;
  }
  return {identical == 3 && moved == 3, fmt("%d of 3 edits keep the connectivity bytes, %d of 3 move vertices", identical, moved)};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const HexCell c = oracles::random_cell(rng, i < 500 ? 0.1 : 0.35);
    worst = std::max({worst, std::abs(scaled_jacobian(c) - oracles::oracle_sj(c, true)),
                      std::abs(scaled_jacobian(c, SjVariant::PaperLiteral) - oracles::oracle_sj(c, false)),
                      std::abs(equiangular_skewness(c) - oracles::oracle_nes(c))});
  }
  const HexCell cube = oracles::unit_cube();
  const double h = std::sqrt(3.0) / 2;
  const double rhombus = face_skewness({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1.5, h, 0), Vec3(0.5, h, 0)});
  const bool ok = worst <= 1e-12 && scaled_jacobian(cube) == 1.0 && equiangular_skewness(cube) == 0.0 &&
                  std::abs(rhombus - 1.0 / 3.0) <= 1e-14;
  return {ok, fmt("max oracle difference %.1e over 1000 cells, cube (%g, %g), 120/60 face %.15f", worst,
                  scaled_jacobian(cube), equiangular_skewness(cube), rhombus)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome io_round_trip() {
  const Generated g = generate("planar_y.json");
  const auto a = testing::scratch_path("acceptance_a.vtk"), b = testing::scratch_path("acceptance_b.vtk");
  write_vtk(g.tree.mesh, a, {{"scaled_jacobian", g.report.sj}});
  const Generated again = generate("planar_y.json");
  write_vtk(again.tree.mesh, b, {{"scaled_jacobian", again.report.sj}});
  const bool deterministic = slurp(a) == slurp(b);
  const auto script = testing::scratch_path("acceptance_reader.py");
  std::ofstream(script) << "import meshio, sys\n"
                           "m = meshio.read(sys.argv[1])\n"
                           "c = m.cells_dict['hexahedron']\n"
                           "with open(sys.argv[2], 'w') as f:\n"
                           "    f.write('%d %d\\n' % (len(m.points), len(c)))\n"
                           "    f.write(' '.join(str(int(i)) for i in c.ravel()) + '\\n')\n"
                           "    f.write(' '.join(repr(float(x)) for x in m.points.ravel()) + '\\n')\n";
  const auto dump = testing::scratch_path("acceptance_reader.txt");
  const std::string cmd = std::string(HEXVESSEL_PYTHON) + " " + script.string() + " " + a.string() + " " + dump.string();
  if (std::system(cmd.c_str()) != 0) return {false, "independent reader failed to run"};
  std::ifstream in(dump);
  std::size_t np = 0, nc = 0;
  in >> np >> nc;
  bool same = np == g.tree.mesh.num_vertices() && nc == g.tree.mesh.num_cells();
  for (std::size_t c = 0; same && c < nc; ++c)
    for (int k = 0; k < 8; ++k) {
      int v = -1;
      in >> v;
      same = same && v == g.tree.mesh.hexes[c][k];
    }
  for (std::size_t i = 0; same && i < np; ++i)
    for (int d = 0; d < 3; ++d) {
      double x = 0;
      in >> x;
      same = same && x == g.tree.mesh.vertices[i][d];
    }
  return {deterministic && same, fmt("meshio reads %zu points and %zu hexes %s; regeneration %s", np, nc,
                                     same ? "bit-identically" : "with differences",
                                     deterministic ? "byte-identical" : "differs")};
}

}  // namespace

int main() {
  configure_threads(1);
  criterion(1, "cylinder benchmark", cylinder_benchmark);
  configure_threads();
  criterion(2, "validity suite", validity_suite);
  criterion(3, "quality trends", trend_properties);
  criterion(4, "harmonic map", harmonic_map);
  criterion(5, "rotation-minimizing frames", rotation_minimizing_frames_check);
  criterion(6, "boundary-layer identities", boundary_layer_identities);
  criterion(7, "junction structure", junction_structure);
  criterion(8, "topology invariance", topology_invariance);
  criterion(9, "metric oracles", metric_oracles);
  criterion(10, "vtk i/o", io_round_trip);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
