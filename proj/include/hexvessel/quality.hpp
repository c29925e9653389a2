#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hexvessel/hexmesh.hpp"

namespace hexvessel {

using HexCell = std::array<Vec3, 8>;

enum class SjVariant {
  CornerNormalized,  // min over corners of the normalized corner determinant
  PaperLiteral,      // min / max|.| of the unnormalized corner determinants
};

/// Corner neighbours (edge order giving a positive determinant on a positive cell).
inline constexpr std::array<std::array<int, 3>, 8> kCornerNeighbours = {{
    {1, 3, 4}, {2, 0, 5}, {3, 1, 6}, {0, 2, 7}, {7, 5, 0}, {4, 6, 1}, {5, 7, 2}, {6, 4, 3},
}};

double scaled_jacobian(const HexCell& cell, SjVariant variant = SjVariant::CornerNormalized);

/// Skewness of one quadrilateral face from its four interior angles.
double face_skewness(const std::array<Vec3, 4>& face);

/// Max face skewness over the six faces, clamped to [0, 1].
double equiangular_skewness(const HexCell& cell);

struct Stats {
  double min = 0, mean = 0, max = 0;
};

struct QualityReport {
  SjVariant variant = SjVariant::CornerNormalized;
  std::vector<double> sj, nes;
  Stats sj_stats, nes_stats;
  // SJ bins: <0, [0,0.5), [0.5,0.8), [0.8,0.9), [0.9,1]
  std::array<std::size_t, 5> sj_histogram{};
  // NES bins: [0,0.25), [0.25,0.5), [0.5,0.75), [0.75,1]
  std::array<std::size_t, 4> nes_histogram{};
};

QualityReport report(const HexMesh& mesh, SjVariant variant = SjVariant::CornerNormalized);

/// Aggregates precomputed per-cell values.
QualityReport summarize(std::vector<double> sj, std::vector<double> nes, SjVariant variant);

/// Report restricted to a subset of cells.
QualityReport subset(const QualityReport& full, const std::vector<int>& cells);

void write_quality_csv(const QualityReport& report, const std::filesystem::path& path);

/// Plain-text table: one row with SJ min/mean/max and NES min/mean/max,
/// followed by the histograms.
std::string format_summary(const QualityReport& report, const std::string& label);

}  // namespace hexvessel
