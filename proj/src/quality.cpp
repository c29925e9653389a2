#include "hexvessel/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hexvessel/error.hpp"
#include "hexvessel/kernels.hpp"

namespace hexvessel {

double scaled_jacobian(const HexCell& x, SjVariant variant) {
  std::array<double, 8> d;
  for (int k = 0; k < 8; ++k) {
    const auto& nb = kCornerNeighbours[k];
    Vec3 e[3];
    for (int a = 0; a < 3; ++a) e[a] = x[nb[a]] - x[k];
    if (variant == SjVariant::CornerNormalized) {
      bool degenerate = false;
      for (auto& v : e) {
        const double len = v.norm();
        if (len == 0.0) degenerate = true;
        else v /= len;
      }
      d[k] = degenerate ? 0.0 : e[0].dot(e[1].cross(e[2]));
    } else {
      d[k] = e[0].dot(e[1].cross(e[2]));
    }
  }
  const double lo = *std::min_element(d.begin(), d.end());
  if (variant == SjVariant::CornerNormalized) return std::clamp(lo, -1.0, 1.0);
  double hi = 0.0;
  for (double v : d) hi = std::max(hi, std::abs(v));
  return hi > 0.0 ? lo / hi : 0.0;
}

double face_skewness(const std::array<Vec3, 4>& f) {
  double tmin = 180.0, tmax = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Vec3 a = f[(k + 1) % 4] - f[k];
    const Vec3 b = f[(k + 3) % 4] - f[k];
    const double la = a.norm(), lb = b.norm();
    if (la == 0.0 || lb == 0.0) return 1.0;
    const double c = std::clamp(a.dot(b) / (la * lb), -1.0, 1.0);
    const double theta = std::acos(c) * 180.0 / kPi;
    tmin = std::min(tmin, theta);
    tmax = std::max(tmax, theta);
  }
  return std::clamp(std::max((tmax - 90.0) / 90.0, (90.0 - tmin) / 90.0), 0.0, 1.0);
}

double equiangular_skewness(const HexCell& x) {
  double worst = 0.0;
  for (const auto& face : kHexFaces) {
    std::array<Vec3, 4> f;
    for (int k = 0; k < 4; ++k) f[k] = x[face[k]];
    worst = std::max(worst, face_skewness(f));
  }
  return worst;
}

namespace {

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = std::clamp(sum / static_cast<double>(v.size()), s.min, s.max);
  return s;
}

int sj_bin(double v) {
  if (v < 0.0) return 0;
  if (v < 0.5) return 1;
  if (v < 0.8) return 2;
  if (v < 0.9) return 3;
  return 4;
}

int nes_bin(double v) {
  if (v < 0.25) return 0;
  if (v < 0.5) return 1;
  if (v < 0.75) return 2;
  return 3;
}

}  // namespace

QualityReport summarize(std::vector<double> sj, std::vector<double> nes, SjVariant variant) {
  if (sj.size() != nes.size()) throw ParameterError("quality: metric arrays differ in length");
  QualityReport r;
  r.variant = variant;
  r.sj = std::move(sj);
  r.nes = std::move(nes);
  r.sj_stats = stats_of(r.sj);
  r.nes_stats = stats_of(r.nes);
  for (double v : r.sj) ++r.sj_histogram[sj_bin(v)];
  for (double v : r.nes) ++r.nes_histogram[nes_bin(v)];
  return r;
}

QualityReport report(const HexMesh& mesh, SjVariant variant) {
  if (mesh.hexes.empty()) throw ParameterError("quality: mesh has no cells");
  std::vector<double> sj(mesh.num_cells()), nes(mesh.num_cells());
  kernels::omp::cell_quality(mesh, variant, sj, nes);
  return summarize(std::move(sj), std::move(nes), variant);
}

QualityReport subset(const QualityReport& full, const std::vector<int>& cells) {
  std::vector<double> sj, nes;
  sj.reserve(cells.size());
  nes.reserve(cells.size());
  for (int c : cells) {
    sj.push_back(full.sj.at(c));
    nes.push_back(full.nes.at(c));
  }
  return summarize(std::move(sj), std::move(nes), full.variant);
}

void write_quality_csv(const QualityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::filesystem::filesystem_error("cannot open for writing", path,
                                                    std::make_error_code(std::errc::io_error));
  out << "cell_id,sj,nes\n";
  char buf[96];
  for (std::size_t c = 0; c < report.sj.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", c, report.sj[c], report.nes[c]);
    out << buf;
  }
  if (!out) throw std::filesystem::filesystem_error("write failed", path,
                                                    std::make_error_code(std::errc::io_error));
}

std::string format_summary(const QualityReport& r, const std::string& label) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %8s %8s %8s %8s %8s %8s %10s\n", "mesh", "SJ_min", "SJ_mean",
                "SJ_max", "NES_min", "NES_mean", "NES_max", "cells");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-14s %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %10zu\n", label.c_str(),
                r.sj_stats.min, r.sj_stats.mean, r.sj_stats.max, r.nes_stats.min, r.nes_stats.mean,
                r.nes_stats.max, r.sj.size());
  os << buf;
  os << "SJ histogram   <0: " << r.sj_histogram[0] << "  0-0.5: " << r.sj_histogram[1]
     << "  0.5-0.8: " << r.sj_histogram[2] << "  0.8-0.9: " << r.sj_histogram[3]
     << "  0.9-1: " << r.sj_histogram[4] << "\n";
  os << "NES histogram  0-0.25: " << r.nes_histogram[0] << "  0.25-0.5: " << r.nes_histogram[1]
     << "  0.5-0.75: " << r.nes_histogram[2] << "  0.75-1: " << r.nes_histogram[3] << "\n";
  os << "SJ variant: " << (r.variant == SjVariant::CornerNormalized ? "corner-normalized" : "paper-literal")
     << "\n";
  return os.str();
}

}  // namespace hexvessel
