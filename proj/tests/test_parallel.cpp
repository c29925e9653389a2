#include <doctest.h>

#include <omp.h>

#include <random>

#include "hexvessel/disc.hpp"
#include "hexvessel/error.hpp"
#include "hexvessel/kernels.hpp"
#include "hexvessel/parallel.hpp"
#include "support.hpp"

using namespace hexvessel;

namespace {

template <class T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].array() == b[i].array()).all()) return false;
  return true;
}

}  // namespace

TEST_CASE("omp kernels agree bitwise with the serial reference") {
  const DiscTemplate disc = build_disc_template();
  const auto sampling = SectionSampling::build(disc.layout(), 12);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 0.01);
  std::vector<Vec2> cps = disc.map().control_points();
  for (auto& p : cps) p += Vec2(n(rng), n(rng));

  for (int threads : {1, 2, 3, 4, 7}) {
    CAPTURE(threads);
    omp_set_num_threads(threads);

    std::vector<Vec2> a(sampling->num_points()), b(sampling->num_points());
    kernels::serial::sample(*sampling, cps, a);
    kernels::omp::sample(*sampling, cps, b);
    CHECK(bitwise_equal(a, b));

    std::vector<Vec3> cps3;
    for (const auto& p : cps) cps3.emplace_back(p.x(), p.y(), n(rng));
    std::vector<Vec3> a3(sampling->num_points()), b3(sampling->num_points());
    kernels::serial::sample(*sampling, cps3, a3);
    kernels::omp::sample(*sampling, cps3, b3);
    CHECK(bitwise_equal(a3, b3));

    std::vector<SectionPlacement> placements;
    for (int k = 0; k < 37; ++k) {
      SectionPlacement s;
      s.control_points = &cps;
      s.frame = Frame::default_for(Vec3(std::sin(0.1 * k), 0.2, 1).normalized());
      s.center = Vec3(0.3 * k, 0, k);
      placements.push_back(s);
    }
    std::vector<Vec3> la(placements.size() * sampling->num_points()), lb(la.size());
    kernels::serial::lift_sections(*sampling, placements, la);
    kernels::omp::lift_sections(*sampling, placements, lb);
    CHECK(bitwise_equal(la, lb));
  }

  SUBCASE("cell quality") {
    const auto [branches, junctions] = testing::planar_y();
    MeshOptions o;
    o.cells_per_side = 6;
    const TreeMesh tm = assemble_tree(branches, junctions, o);
    for (SjVariant v : {SjVariant::CornerNormalized, SjVariant::PaperLiteral})
      for (int threads : {1, 3, 4}) {
        omp_set_num_threads(threads);
        std::vector<double> sa(tm.mesh.num_cells()), na(sa.size()), sb(sa.size()), nb(sa.size());
        kernels::serial::cell_quality(tm.mesh, v, sa, na);
        kernels::omp::cell_quality(tm.mesh, v, sb, nb);
        CHECK(sa == sb);
        CHECK(na == nb);
      }
  }
}

TEST_CASE("tree meshes are independent of the thread count") {
  const auto [branches, junctions] = testing::planar_y();
  MeshOptions o;
  o.cells_per_side = 4;
  omp_set_num_threads(1);
  const TreeMesh a = assemble_tree(branches, junctions, o);
  omp_set_num_threads(4);
  const TreeMesh b = assemble_tree(branches, junctions, o);
  CHECK(a.mesh.hexes == b.mesh.hexes);
  CHECK(bitwise_equal(a.mesh.vertices, b.mesh.vertices));
}

TEST_CASE("thread configuration") {
  CHECK(configure_threads(3) == 3);
  CHECK(max_threads() == 3);
  setenv("HEXVESSEL_THREADS", "2", 1);
  CHECK(configure_threads() == 2);
  unsetenv("HEXVESSEL_THREADS");
  CHECK(configure_threads(1) == 1);
  CHECK_THROWS_AS(configure_threads(0), ParameterError);
}
