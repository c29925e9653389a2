#pragma once

#include <span>
#include <vector>

#include "hexvessel/frames.hpp"
#include "hexvessel/hexmesh.hpp"
#include "hexvessel/quality.hpp"
#include "hexvessel/sampling.hpp"

namespace hexvessel {

/// One planar section placed in space: x3 = center + x n + y b.
struct SectionPlacement {
  const std::vector<Vec2>* control_points = nullptr;
  Frame frame;
  Vec3 center = Vec3::Zero();
};

// Data-parallel kernels. The serial versions are the reference
// implementation; the OpenMP versions must agree with them bitwise.
namespace kernels {

namespace serial {
void sample(const SectionSampling& s, std::span<const Vec2> cps, std::span<Vec2> out);
void sample(const SectionSampling& s, std::span<const Vec3> cps, std::span<Vec3> out);
/// Writes sections.size() * s.num_points() lifted points, ring by ring.
void lift_sections(const SectionSampling& s, std::span<const SectionPlacement> sections, std::span<Vec3> out);
void cell_quality(const HexMesh& mesh, SjVariant variant, std::span<double> sj, std::span<double> nes);
}  // namespace serial

namespace omp {
void sample(const SectionSampling& s, std::span<const Vec2> cps, std::span<Vec2> out);
void sample(const SectionSampling& s, std::span<const Vec3> cps, std::span<Vec3> out);
void lift_sections(const SectionSampling& s, std::span<const SectionPlacement> sections, std::span<Vec3> out);
void cell_quality(const HexMesh& mesh, SjVariant variant, std::span<double> sj, std::span<double> nes);
}  // namespace omp

}  // namespace kernels
}  // namespace hexvessel
