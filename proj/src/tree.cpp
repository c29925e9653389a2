#include "hexvessel/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "hexvessel/error.hpp"
#include "hexvessel/quality.hpp"
#include "hexvessel/sampling.hpp"

namespace hexvessel {

DiscTemplate make_template(const MeshOptions& options) {
  DiscTemplate disc = build_disc_template(options.disc);
  if (options.boundary_layer_alpha != 0.0)
    disc = apply_boundary_layer(disc, options.boundary_layer_alpha, options.straighten);
  return disc;
}

namespace {

struct Topology {
  std::vector<int> head_junction, tail_junction;
  std::vector<int> inlet_of;                     // per junction: inlet branch
  std::vector<std::vector<int>> outlets_of;      // per junction: outlet branches in input order
  std::vector<int> order;                        // branches, parents first
};

Topology analyse(const std::vector<BranchGeometry>& branches, const std::vector<JunctionSpec>& junctions) {
  std::map<std::string, int> index;
  for (std::size_t b = 0; b < branches.size(); ++b)
    if (!index.emplace(branches[b].id, static_cast<int>(b)).second)
      throw TopologyError("duplicate branch id '" + branches[b].id + "'");

  Topology topo;
  const int nbr = static_cast<int>(branches.size());
  topo.head_junction.assign(nbr, -1);
  topo.tail_junction.assign(nbr, -1);
  for (std::size_t j = 0; j < junctions.size(); ++j) {
    const JunctionSpec& spec = junctions[j];
    const std::string where = "junction '" + spec.id + "': ";
    if (spec.ends.size() < 2) throw TopologyError(where + "needs at least two branch ends");
    int inlet = -1;
    std::vector<int> outlets;
    for (const auto& end : spec.ends) {
      const auto it = index.find(end.branch);
      if (it == index.end()) throw TopologyError(where + "unknown branch id '" + end.branch + "'");
      const int b = it->second;
      int& slot = end.head ? topo.head_junction[b] : topo.tail_junction[b];
      if (slot >= 0)
        throw TopologyError(where + "branch '" + end.branch + "' " + (end.head ? "head" : "tail") +
                            " is already used by another junction");
      slot = static_cast<int>(j);
      if (end.head) {
        outlets.push_back(b);
      } else {
        if (inlet >= 0) throw TopologyError(where + "more than one branch flows into the junction");
        inlet = b;
      }
    }
    if (inlet < 0) throw TopologyError(where + "no branch flows into the junction (one end must be a tail)");
    topo.inlet_of.push_back(inlet);
    topo.outlets_of.push_back(std::move(outlets));
  }

  std::vector<int> parent(nbr, -1);
  for (int b = 0; b < nbr; ++b)
    if (topo.head_junction[b] >= 0) parent[b] = topo.inlet_of[topo.head_junction[b]];
  for (int b = 0; b < nbr; ++b) {
    int cur = b;
    for (int steps = 0; cur >= 0; ++steps) {
      if (steps > nbr) throw TopologyError("branch '" + branches[b].id + "' lies on a cycle");
      cur = parent[cur];
    }
  }
  std::queue<int> queue;
  for (int b = 0; b < nbr; ++b)
    if (parent[b] < 0) queue.push(b);
  while (!queue.empty()) {
    const int b = queue.front();
    queue.pop();
    topo.order.push_back(b);
    if (topo.tail_junction[b] >= 0)
      for (int c : topo.outlets_of[topo.tail_junction[b]]) queue.push(c);
  }
  return topo;
}

int auto_sections(const BranchGeometry& geom) {
  double length = 0.0;
  Vec3 prev = geom.centerline.eval(0.0);
  for (int i = 1; i <= 256; ++i) {
    const Vec3 cur = geom.centerline.eval(i / 256.0);
    length += (cur - prev).norm();
    prev = cur;
  }
  const double spacing = geom.mean_radius_at(0.5);
  return std::max(3, static_cast<int>(std::lround(length / spacing)) + 1);
}

double ring_spacing(const std::vector<LiftedSection>& sections) {
  double sum = 0.0;
  for (std::size_t i = 1; i < sections.size(); ++i) sum += (sections[i].center - sections[i - 1].center).norm();
  return sum / static_cast<double>(sections.size() - 1);
}

}  // namespace

TreeMesh assemble_tree(const std::vector<BranchGeometry>& branches, const std::vector<JunctionSpec>& junctions,
                       const MeshOptions& options) {
  if (branches.empty()) throw ParameterError("tree: no branches");
  if (options.sections != 0 && options.sections < 2) throw ParameterError("tree: sections must be 0 or >= 2");
  for (const auto& b : branches) b.validate();
  const Topology topo = analyse(branches, junctions);

  const DiscTemplate disc = make_template(options);
  const auto sampling = SectionSampling::build(disc.layout(), options.cells_per_side);
  const bool diameter_rule = options.diameter_rule.value_or(junctions.size() > 1);

  TreeMesh result;
  std::vector<std::vector<EndSection>> oriented(junctions.size());
  std::vector<std::vector<LiftedSection>> catalogue(branches.size());

  auto find_end = [&](int j, int index) -> const EndSection& {
    for (const auto& s : oriented[j])
      if (s.input_index == index) return s;
    throw ParameterError("tree: junction end not found");
  };

  for (int b : topo.order) {
    const BranchGeometry& geom = branches[b];
    const int n = options.sections > 0 ? options.sections : auto_sections(geom);
    CatalogueOptions co;
    co.arclength_spacing = options.arclength_spacing;
    co.kink_threshold = options.kink_threshold;
    co.warnings = &result.warnings;
    const int hj = topo.head_junction[b];
    if (hj >= 0) {
      const auto& outs = topo.outlets_of[hj];
      const int pos = static_cast<int>(std::find(outs.begin(), outs.end(), b) - outs.begin());
      co.initial_frame = find_end(hj, pos + 1).flow_frame;
    }
    const int tj = topo.tail_junction[b];
    if (tj >= 0) {
      CatalogueOptions probe = co;
      probe.warnings = nullptr;
      const FramedPath path = branch_frames(geom, n, probe);
      EndSeed inlet{path.centers.back(), unit_tangent(geom.centerline, 1.0), EndRole::Inlet, {}};
      std::vector<EndSeed> outs;
      for (int c : topo.outlets_of[tj])
        outs.push_back({branches[c].centerline.eval(0.0), unit_tangent(branches[c].centerline, 0.0),
                        EndRole::Outlet, {}});
      try {
        oriented[tj] = orient_sections(inlet, outs, path.frames.back().normal);
      } catch (const OrientationError& e) {
        throw OrientationError("junction '" + junctions[tj].id + "': " + e.what());
      } catch (const DegenerateJunctionError& e) {
        throw DegenerateJunctionError("junction '" + junctions[tj].id + "': " + e.what());
      }
      const double theta = align_rotation(path.frames.back(), find_end(tj, 0).flow_frame);
      if (hj >= 0) co.end_twist = theta;
      else co.base_twist = theta;
    }
    catalogue[b] = catalogue_sections(geom, n, disc, co);
  }

  std::vector<HexMesh> blocks;
  std::vector<BlockInfo> info;
  double diameter = 0.0;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    StructuredBranchMesh m;
    try {
      m = sweep_branch(catalogue[b], *sampling);
    } catch (const SweepError& e) {
      throw SweepError("branch '" + branches[b].id + "': " + e.what());
    }
    info.push_back({BlockInfo::Kind::Branch, branches[b].id, 0, m.mesh.num_cells()});
    blocks.push_back(std::move(m.mesh));
    diameter += 2.0 * branches[b].mean_radius_at(0.5);
  }
  diameter /= static_cast<double>(branches.size());

  for (std::size_t j = 0; j < junctions.size(); ++j) {
    const JunctionSpec& spec = junctions[j];
    std::vector<EndSection> sections = oriented[j];
    double height = 0.0;
    for (auto& s : sections) {
      const int b = s.input_index == 0 ? topo.inlet_of[j] : topo.outlets_of[j][s.input_index - 1];
      const LiftedSection& ls = s.input_index == 0 ? catalogue[b].back() : catalogue[b].front();
      s.center = ls.center;
      s.flow_frame = ls.frame;
      const Vec3 inward = s.role == EndRole::Inlet ? ls.frame.tangent : Vec3(-ls.frame.tangent);
      s.inward_frame = Frame::from_tangent_normal(inward, ls.frame.normal);
      s.section = ls.section;
      height += ring_spacing(catalogue[b]);
    }
    JunctionOptions jo;
    jo.skeleton.tangent_scale = spec.tangent_scale.value_or(options.tangent_scale);
    jo.skeleton.diameter_rule = diameter_rule && !spec.tangent_scale;
    jo.mode = spec.mode.value_or(options.mode);
    jo.layers = spec.layers.value_or(0);
    jo.cell_height = height / static_cast<double>(sections.size());
    jo.source_tangent_scale = options.source_tangent_scale;
    JunctionMesh jm;
    try {
      jm = mesh_junction(sections, disc, *sampling, jo);
    } catch (const MeshingError& e) {
      throw MeshingError("junction '" + spec.id + "': " + e.what());
    }
    info.push_back({BlockInfo::Kind::Junction, spec.id, 0, jm.mesh.num_cells(),
                    *std::max_element(jm.axis_kinks.begin(), jm.axis_kinks.end())});
    blocks.push_back(std::move(jm.mesh));
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const HexMesh& m = blocks[b];
    const auto cells = static_cast<std::ptrdiff_t>(m.num_cells());
    std::size_t inverted = 0;
#pragma omp parallel for reduction(+ : inverted) schedule(static)
    for (std::ptrdiff_t c = 0; c < cells; ++c) inverted += scaled_jacobian(m.cell(static_cast<std::size_t>(c))) <= 0.0;
    if (inverted > 0) {
      std::ostringstream os;
      os << (info[b].kind == BlockInfo::Kind::Branch ? "branch '" : "junction '") << info[b].id << "': " << inverted
         << " of " << m.num_cells() << " cells are inverted or degenerate";
      throw FoldError(os.str());
    }
  }

  WeldResult welded = weld(blocks, 1e-6 * diameter);
  std::size_t first = 0;
  for (auto& bi : info) {
    bi.first_cell = first;
    first += bi.num_cells;
  }
  std::vector<int> inlet_caps, outlet_caps;
  const int v = sampling->num_points();
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const auto& map = welded.vertex_map[b];
    const int rings = static_cast<int>(catalogue[b].size());
    if (topo.head_junction[b] < 0)
      for (int k = 0; k < v; ++k) inlet_caps.push_back(map[k]);
    if (topo.tail_junction[b] < 0)
      for (int k = 0; k < v; ++k) outlet_caps.push_back(map[(rings - 1) * v + k]);
  }
  tag_boundary(welded.mesh, inlet_caps, outlet_caps);
  result.mesh = std::move(welded.mesh);
  result.blocks = std::move(info);
  return result;
}

}  // namespace hexvessel
