#include "hexvessel/kernels.hpp"

namespace hexvessel::kernels {

namespace {

template <class P>
inline P sample_row(const SectionSampling& s, std::span<const P> cps, int r) {
  P x = P::Zero();
  for (int k = s.row_offsets[r]; k < s.row_offsets[r + 1]; ++k) x += s.weights[k] * cps[s.columns[k]];
  return x;
}

inline Vec3 lift_row(const SectionSampling& s, const SectionPlacement& sec, int r) {
  const Vec2 x = sample_row<Vec2>(s, *sec.control_points, r);
  return sec.center + x.x() * sec.frame.normal + x.y() * sec.frame.binormal;
}

inline void one_cell(const HexMesh& mesh, SjVariant variant, std::size_t c, double& sj, double& nes) {
  const HexCell cell = mesh.cell(c);
  sj = scaled_jacobian(cell, variant);
  nes = equiangular_skewness(cell);
}

}  // namespace

namespace serial {

void sample(const SectionSampling& s, std::span<const Vec2> cps, std::span<Vec2> out) {
  for (int r = 0; r < s.num_points(); ++r) out[r] = sample_row<Vec2>(s, cps, r);
}

void sample(const SectionSampling& s, std::span<const Vec3> cps, std::span<Vec3> out) {
  for (int r = 0; r < s.num_points(); ++r) out[r] = sample_row<Vec3>(s, cps, r);
}

void lift_sections(const SectionSampling& s, std::span<const SectionPlacement> sections, std::span<Vec3> out) {
  const int v = s.num_points();
  for (std::size_t i = 0; i < sections.size(); ++i)
    for (int r = 0; r < v; ++r) out[i * v + r] = lift_row(s, sections[i], r);
}

void cell_quality(const HexMesh& mesh, SjVariant variant, std::span<double> sj, std::span<double> nes) {
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) one_cell(mesh, variant, c, sj[c], nes[c]);
}

}  // namespace serial

namespace omp {

void sample(const SectionSampling& s, std::span<const Vec2> cps, std::span<Vec2> out) {
  const int n = s.num_points();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) out[r] = sample_row<Vec2>(s, cps, r);
}

void sample(const SectionSampling& s, std::span<const Vec3> cps, std::span<Vec3> out) {
  const int n = s.num_points();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) out[r] = sample_row<Vec3>(s, cps, r);
}

void lift_sections(const SectionSampling& s, std::span<const SectionPlacement> sections, std::span<Vec3> out) {
  const int v = s.num_points();
  const long n = static_cast<long>(sections.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    for (int r = 0; r < v; ++r) out[i * v + r] = lift_row(s, sections[i], r);
}

void cell_quality(const HexMesh& mesh, SjVariant variant, std::span<double> sj, std::span<double> nes) {
  const long n = static_cast<long>(mesh.num_cells());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n; ++c) one_cell(mesh, variant, c, sj[c], nes[c]);
}

}  // namespace omp

}  // namespace hexvessel::kernels
