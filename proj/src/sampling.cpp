#include "hexvessel/sampling.hpp"

#include "hexvessel/error.hpp"
#include "hexvessel/kernels.hpp"

namespace hexvessel {

std::shared_ptr<const SectionSampling> SectionSampling::build(const MultiPatchLayout& layout, int m) {
  if (m < 2 || m % 2 != 0) throw ParameterError("sampling: cells per patch side must be even and >= 2");
  auto s = std::make_shared<SectionSampling>();
  s->cells_per_side = m;
  s->numbering = MultiPatchNumbering::build(m + 1);
  const int np = s->numbering.num_unique;
  s->params.assign(np, {-1.0, 0.0, 0.0});
  s->on_boundary.assign(np, false);
  for (int p = 0; p < kNumPatches; ++p)
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        const int id = s->numbering.at(p, i, j);
        if (s->params[id][0] < 0)
          s->params[id] = {static_cast<double>(p), static_cast<double>(i) / m, static_cast<double>(j) / m};
        if (p > 0 && i == m) s->on_boundary[id] = true;
      }
  for (int p = 0; p < kNumPatches; ++p)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        s->quads.push_back({s->numbering.at(p, a, b), s->numbering.at(p, a + 1, b),
                            s->numbering.at(p, a + 1, b + 1), s->numbering.at(p, a, b + 1)});

  s->row_offsets.reserve(np + 1);
  s->row_offsets.push_back(0);
  for (int id = 0; id < np; ++id) {
    const auto& prm = s->params[id];
    const PatchBasis b = eval_patch_basis(layout, static_cast<int>(prm[0]), prm[1], prm[2]);
    for (std::size_t k = 0; k < b.dofs.size(); ++k) {
      if (b.value[k] == 0.0) continue;
      s->columns.push_back(b.dofs[k]);
      s->weights.push_back(b.value[k]);
    }
    s->row_offsets.push_back(static_cast<int>(s->columns.size()));
  }
  return s;
}

std::vector<Vec2> SectionSampling::sample(const MultiPatchSplineMap& map) const {
  std::vector<Vec2> out(num_points());
  kernels::omp::sample(*this, map.control_points(), out);
  return out;
}

std::vector<Vec3> SectionSampling::sample3(const std::vector<Vec3>& control_values) const {
  std::vector<Vec3> out(num_points());
  kernels::omp::sample(*this, control_values, out);
  return out;
}

}  // namespace hexvessel
