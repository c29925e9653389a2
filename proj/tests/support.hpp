#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <unordered_map>
#include <string>
#include <vector>

#include "hexvessel/branch.hpp"
#include "hexvessel/geometry_io.hpp"
#include "hexvessel/hexmesh.hpp"
#include "hexvessel/spline.hpp"
#include "hexvessel/tree.hpp"

namespace testing {

using namespace hexvessel;

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(HEXVESSEL_DATA_DIR) / name;
}

inline std::filesystem::path scratch_path(const std::string& name) {
  const std::filesystem::path dir(HEXVESSEL_TEST_SCRATCH);
  std::filesystem::create_directories(dir);
  return dir / name;
}

/// Cubic straight segment with constant radius.
inline BranchGeometry straight_branch(const std::string& id, const Vec3& a, const Vec3& b, double radius) {
  BranchGeometry g;
  g.id = id;
  std::vector<Vec3> cps;
  for (int i = 0; i < 4; ++i) cps.push_back(a + (b - a) * (i / 3.0));
  g.centerline = Curve3(KnotVector::clamped_uniform(3, 4), cps);
  g.radius = ScalarSpline(KnotVector::clamped_uniform(3, 4), {radius, radius, radius, radius});
  return g;
}

/// Symmetric planar Y in the xy plane: inlet along +y, outlets at +/-45 degrees.
inline std::pair<std::vector<BranchGeometry>, std::vector<JunctionSpec>> planar_y(double gap = 2.2) {
  const Vec3 d1 = Vec3(1, 1, 0).normalized(), d2 = Vec3(-1, 1, 0).normalized();
  std::vector<BranchGeometry> b = {
      straight_branch("inlet", {0, -20, 0}, {0, -gap, 0}, 1.0),
      straight_branch("right", gap * d1, (gap + 16) * d1, 0.8),
      straight_branch("left", gap * d2, (gap + 16) * d2, 0.8),
  };
  std::vector<JunctionSpec> j = {{"Y", {{"inlet", false}, {"right", true}, {"left", true}}, {}, {}, {}}};
  return {b, j};
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

/// Copy of a branch moved by x -> R x + c.
inline BranchGeometry transformed(const BranchGeometry& g, const Mat3& rot, const Vec3& shift) {
  BranchGeometry out = g;
  std::vector<Vec3> cps;
  for (const auto& p : g.centerline.control_points()) cps.push_back(rot * p + shift);
  out.centerline = Curve3(g.centerline.knot_vector(), cps);
  return out;
}

/// Largest distance from any vertex of `a` to its nearest vertex of `b`
/// after mapping through f. Brute force over a coarse spatial hash.
template <class F>
double vertex_set_distance(const HexMesh& a, const HexMesh& b, F f, double cell) {
  std::unordered_multimap<long long, int> grid;
  auto key = [cell](const Vec3& p) {
    const long long i = std::llround(std::floor(p.x() / cell)), j = std::llround(std::floor(p.y() / cell)),
                    k = std::llround(std::floor(p.z() / cell));
    return (i * 73856093LL) ^ (j * 19349663LL) ^ (k * 83492791LL);
  };
  for (std::size_t i = 0; i < b.vertices.size(); ++i) grid.emplace(key(b.vertices[i]), static_cast<int>(i));
  double worst = 0.0;
  for (const auto& p : a.vertices) {
    const Vec3 q = f(p);
    double best = std::numeric_limits<double>::infinity();
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto range = grid.equal_range(key(q + cell * Vec3(dx, dy, dz)));
          for (auto it = range.first; it != range.second; ++it) best = std::min(best, (b.vertices[it->second] - q).norm());
        }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace testing
