#include <doctest.h>

#include <cmath>
#include <random>

#include "hexvessel/branch.hpp"
#include "hexvessel/error.hpp"
#include "hexvessel/quality.hpp"
#include "support.hpp"

using namespace hexvessel;
using testing::straight_branch;

namespace {

const DiscTemplate& disc() {
  static const DiscTemplate d = build_disc_template();
  return d;
}

const SectionSampling& sampling(int m = 6) {
  static const auto s6 = SectionSampling::build(disc().layout(), 6);
  static const auto s10 = SectionSampling::build(disc().layout(), 10);
  return m == 6 ? *s6 : *s10;
}

BranchGeometry curved_branch() {
  BranchGeometry g;
  g.id = "curved";
  g.centerline = Curve3(KnotVector::clamped_uniform(3, 6),
                        {Vec3(0, 0, 0), Vec3(0, 0, 10), Vec3(6, 2, 18), Vec3(14, 8, 22), Vec3(22, 16, 22), Vec3(28, 24, 18)});
  g.radius = ScalarSpline(KnotVector::clamped_uniform(3, 4), {1.5, 1.4, 1.2, 1.3});
  return g;
}

// Straight tube whose radius lives in a space rich enough to hold local edits.
BranchGeometry editable_tube(double radius = 1.5, int coefficients = 41) {
  BranchGeometry g = straight_branch("tube", Vec3::Zero(), Vec3(0, 0, 40), radius);
  g.radius = ScalarSpline(KnotVector::clamped_uniform(3, coefficients), std::vector<double>(coefficients, radius));
  return g;
}

double min_sj(const HexMesh& m) { return report(m).sj_stats.min; }

bool max_cp_difference_zero(const SectionMap& a, const SectionMap& b) { return a.control_points() == b.control_points(); }

}  // namespace

TEST_CASE("lifting") {
  LiftedSection s;
  s.frame = Frame{Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  s.center = Vec3(0, 0, 5);
  CHECK((s.lift(Vec2(1, 0)) - Vec3(1, 0, 5)).norm() == 0.0);
}

TEST_CASE("catalogue of a straight tube") {
  const auto g = straight_branch("s", Vec3::Zero(), Vec3(0, 0, 8), 1.0);
  const auto cat = catalogue_sections(g, 3, disc());
  REQUIRE(cat.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK((cat[i].center - Vec3(0, 0, 4.0 * i)).norm() < 1e-12);
    CHECK((cat[i].frame.normal - cat[0].frame.normal).norm() == 0.0);
    CHECK(max_cp_difference_zero(cat[i].section, disc().map()));
  }
}

TEST_CASE("sections are planar and centred on the centerline") {
  const auto g = curved_branch();
  const auto cat = catalogue_sections(g, 25, disc());
  for (const auto& s : cat) {
    double worst = 0.0;
    for (const Vec2& p : sampling().sample(s.section)) worst = std::max(worst, std::abs((s.lift(p) - s.center).dot(s.frame.tangent)));
    CHECK(worst < 1e-10);
    CHECK(s.frame.orthonormality_error() < 1e-10);
  }
}

TEST_CASE("sweeping") {
  SUBCASE("two sections") {
    const auto g = straight_branch("s", Vec3::Zero(), Vec3(0, 0, 2), 1.0);
    const auto m = sweep_branch(catalogue_sections(g, 2, disc()), sampling());
    CHECK(m.mesh.num_vertices() == 2 * static_cast<std::size_t>(sampling().num_points()));
    CHECK(m.mesh.num_cells() == static_cast<std::size_t>(sampling().num_quads()));
    CHECK(min_sj(m.mesh) > 0.0);
    CHECK(sampling().num_points() == 5 * 36 + 2 * 6 + 1);
  }

  SUBCASE("straight tube cells are congruent along the axis") {
    const auto g = straight_branch("s", Vec3::Zero(), Vec3(0, 0, 9), 1.0);
    const auto m = sweep_branch(catalogue_sections(g, 10, disc()), sampling());
    const std::size_t per = sampling().quads.size();
    double worst = 0.0;
    for (std::size_t c = per; c < m.mesh.num_cells(); ++c) {
      const auto a = m.mesh.cell(c), b = m.mesh.cell(c % per);
      const Vec3 shift = a[0] - b[0];
      for (int k = 0; k < 8; ++k) worst = std::max(worst, (a[k] - b[k] - shift).norm());
    }
    CHECK(worst < 1e-9);
  }

  SUBCASE("connectivity depends only on topology parameters") {
    const auto a = sweep_branch(catalogue_sections(curved_branch(), 30, disc()), sampling());
    const auto b = sweep_branch(catalogue_sections(straight_branch("x", Vec3(1, 2, 3), Vec3(-4, 0, 1), 0.3), 30, disc()),
                                sampling());
    CHECK(a.mesh.hexes == b.mesh.hexes);
    CHECK(a.mesh.hexes == sweep_connectivity(sampling(), 30));
  }

  SUBCASE("rigid motion moves every vertex") {
    std::mt19937_64 rng(12);
    const Mat3 r = testing::random_rotation(rng);
    const Vec3 shift(3, -1, 7);
    const auto g = curved_branch();
    CatalogueOptions o;
    o.initial_frame = Frame::default_for(unit_tangent(g.centerline, 0.0));
    const auto a = sweep_branch(catalogue_sections(g, 20, disc(), o), sampling());
    CatalogueOptions ro;
    ro.initial_frame = Frame{r * o.initial_frame->tangent, r * o.initial_frame->normal, r * o.initial_frame->binormal};
    const auto b = sweep_branch(catalogue_sections(testing::transformed(g, r, shift), 20, disc(), ro), sampling());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.mesh.num_vertices(); ++i)
      worst = std::max(worst, (b.mesh.vertices[i] - (r * a.mesh.vertices[i] + shift)).norm());
    CHECK(worst < 1e-9);
  }

  SUBCASE("inverted stacking is reported with the section pair") {
    // Sections spaced far less than the bend radius allows: a hairpin.
    BranchGeometry g;
    g.id = "hairpin";
    g.centerline = Curve3(KnotVector::clamped_uniform(3, 4), {Vec3(0, 0, 0), Vec3(0, 0, 3), Vec3(0.6, 0, 3), Vec3(0.6, 0, 0)});
    g.radius = ScalarSpline(KnotVector::clamped_uniform(3, 4), {1, 1, 1, 1});
    try {
      sweep_branch(catalogue_sections(g, 40, disc()), sampling());
      FAIL("expected SweepError");
    } catch (const SweepError& e) {
      CHECK(std::string(e.what()).find("between sections") != std::string::npos);
    }
  }
}

TEST_CASE("profiles") {
  SUBCASE("negative radius is an input error naming the branch") {
    auto g = straight_branch("bad", Vec3::Zero(), Vec3(0, 0, 2), 1.0);
    g.radius = ScalarSpline(KnotVector::clamped_uniform(3, 4), {1, -2, 1, 1});
    try {
      g.validate();
      FAIL("expected InvalidProfileError");
    } catch (const InvalidProfileError& e) {
      CHECK(std::string(e.what()).find("bad") != std::string::npos);
    }
  }

  SUBCASE("contour branches") {
    auto g = straight_branch("oval", Vec3::Zero(), Vec3(0, 0, 10), 1.0);
    g.radius.reset();
    for (double t : {0.0, 1.0}) {
      Contour c{t, {}};
      const double a = t == 0 ? 1.0 : 1.6, b = t == 0 ? 1.0 : 0.7;
      for (int k = 0; k < 48; ++k) c.points.emplace_back(a * std::cos(2 * kPi * k / 48), b * std::sin(2 * kPi * k / 48));
      g.contours.push_back(c);
    }
    g.validate();
    CHECK(g.mean_radius_at(0.0) == doctest::Approx(1.0).epsilon(1e-2));
    const auto cat = catalogue_sections(g, 6, disc());
    const auto m = sweep_branch(cat, sampling());
    CHECK(min_sj(m.mesh) > 0.0);
    // Contours are recentred on their centroid.
    CHECK(g.contour_at(0.5).centroid().norm() < 1e-12);
  }

  SUBCASE("non-convex contours are rejected") {
    auto g = straight_branch("dent", Vec3::Zero(), Vec3(0, 0, 10), 1.0);
    g.radius.reset();
    Contour c{0.0, {}};
    for (int k = 0; k < 24; ++k) {
      const double r = k == 6 ? 0.4 : 1.0;
      c.points.emplace_back(r * std::cos(2 * kPi * k / 24), r * std::sin(2 * kPi * k / 24));
    }
    g.contours.push_back(c);
    CHECK_THROWS_AS(g.validate(), ConvexityError);
  }
}

TEST_CASE("radius edits") {
  const BranchGeometry g = editable_tube();

  SUBCASE("identity edit") {
    auto h = curved_branch();
    h.radius = ScalarSpline(KnotVector::clamped_uniform(3, 8), {1.5, 1.4, 1.2, 1.3, 1.1, 1.3, 1.5, 1.4});
    std::vector<RadiusTarget> targets;
    for (double t : {0.3, 0.4, 0.5, 0.6}) targets.push_back({t, h.radius->eval(t)});
    const auto e = edit_radius(h, 0.2, 0.7, targets, 0.0);
    double worst = 0.0;
    for (int i = 0; i < 512; ++i) worst = std::max(worst, std::abs(e.radius->eval(i / 511.0) - h.radius->eval(i / 511.0)));
    CHECK(worst <= 1e-8);
  }

  SUBCASE("stenosis lowers the radius and keeps the connectivity") {
    std::vector<RadiusTarget> targets = {{0.42, 1.1}, {0.47, 0.75}, {0.53, 0.75}, {0.58, 1.1}};
    const auto e = edit_radius(g, 0.35, 0.65, targets);
    double before = 1e9, after = 1e9;
    for (int i = 0; i <= 300; ++i) {
      const double t = 0.35 + 0.3 * i / 300;
      before = std::min(before, g.radius->eval(t));
      after = std::min(after, e.radius->eval(t));
    }
    CHECK(after < before);
    CHECK(after == doctest::Approx(0.75).epsilon(0.1));
    CHECK(e.radius->knot_vector() == g.radius->knot_vector());
    const auto a = sweep_branch(catalogue_sections(g, 40, disc()), sampling());
    const auto b = sweep_branch(catalogue_sections(e, 40, disc()), sampling());
    CHECK(a.mesh.hexes == b.mesh.hexes);
  }

  SUBCASE("aneurysm severity lowers SJ_min") {
    std::vector<double> sj;
    for (double factor : {1.5, 2.0, 2.5}) {
      const double r = 1.5;
      std::vector<RadiusTarget> targets = {{0.44, r * (1 + (factor - 1) * 0.6)}, {0.48, r * factor}, {0.52, r * factor},
                                           {0.56, r * (1 + (factor - 1) * 0.6)}};
      const auto e = edit_radius(g, 0.38, 0.62, targets);
      sj.push_back(min_sj(sweep_branch(catalogue_sections(e, 60, disc()), sampling(10)).mesh));
    }
    MESSAGE("aneurysm SJ_min " << sj[0] << " " << sj[1] << " " << sj[2]);
    CHECK(sj[0] > sj[1]);
    CHECK(sj[1] > sj[2]);
  }

  SUBCASE("invalid edits") {
    CHECK_THROWS_AS(edit_radius(g, 0.2, 0.6, std::vector<RadiusTarget>{{0.4, -1.0}}), InvalidProfileError);
    CHECK_THROWS_AS(edit_radius(g, 0.6, 0.2, std::vector<RadiusTarget>{{0.4, 1.0}}), ParameterError);
    CHECK_THROWS_AS(edit_radius(g, 0.2, 0.6, std::vector<RadiusTarget>{{0.7, 1.0}}), ParameterError);
  }
}
