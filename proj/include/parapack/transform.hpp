#pragma once

#include <string>
#include <utility>
#include <vector>

#include "parapack/criterion.hpp"
#include "parapack/field.hpp"
#include "parapack/geometry.hpp"
#include "parapack/window.hpp"

namespace parapack {

/// Address of one frame element: coarse (j = 0, translation lambda = P m) or
/// fine (scale j >= 1, rotation k, translation lambda = P m).
struct PacketIndex {
  int j = 0;
  int k = 0;
  Eigen::Vector2i m{0, 0};
};

inline bool operator==(const PacketIndex& a, const PacketIndex& b) {
  return a.j == b.j && a.k == b.k && a.m == b.m;
}
inline bool operator<(const PacketIndex& a, const PacketIndex& b) {
  if (a.j != b.j) return a.j < b.j;
  if (a.k != b.k) return a.k < b.k;
  if (a.m(0) != b.m(0)) return a.m(0) < b.m(0);
  return a.m(1) < b.m(1);
}

/// Frequency-side packet value:
///   fine:   8^{-j/2} e^{-2 pi i xi . A^{-1} lambda} phi^(B_{j,k} xi)
///   coarse: e^{-2 pi i xi . lambda} phi0^(xi)
Complex packet_frequency(const PacketIndex& idx, const WindowSpec& w,
                         const CoarseWindowSpec& w0, const Eigen::Vector2d& xi,
                         const Lattice& lat);

/// Frame coefficients, sorted by (j, k, m1, m2).
struct CoefficientSet {
  std::vector<std::pair<PacketIndex, Complex>> entries;
  Eigen::Matrix2d lattice_generator = Eigen::Matrix2d::Identity();
  int j_max = 0;
  int grid_n = 0;
  double grid_extent = 0.0;  // frequency extent of the source grid

  const Complex* find(const PacketIndex& idx) const;
};

enum class AnalysisPath { Direct, Fast };

/// Grid quadrature coefficients of a frequency field against every packet
/// whose center A^{-1} lambda lies in the spatial fundamental domain
/// [-X, X)^2, X = n / (4 extent). The Fast path uses a zero-padded FFT per
/// band whenever the center lattice is rationally aligned with the spatial
/// grid (denominator <= 16), and falls back to direct summation otherwise;
/// Direct always evaluates the quadrature sums one packet at a time.
CoefficientSet analyze(const Field& f, const WindowSpec& w,
                       const CoarseWindowSpec& w0, const Lattice& lat, int j_max,
                       AnalysisPath path = AnalysisPath::Fast);

/// Accumulate sum_idx c(idx) * packet_idx on the grid.
Field synthesize(const CoefficientSet& coeffs, const WindowSpec& w,
                 const CoarseWindowSpec& w0, const FreqGrid& grid,
                 AnalysisPath path = AnalysisPath::Fast);

struct OperatorCheckReport {
  double residual = 0.0;  // || |lat| S^ f - m f ||_2
  double bound = 0.0;     // defect * ||f||_2
  double f_norm = 0.0;
  bool within = false;    // residual <= bound * (1 + slack) + 1e-12 * ||f||
};

OperatorCheckReport frame_operator_check(const Field& f, const WindowSpec& w,
                                         const CoarseWindowSpec& w0,
                                         const Lattice& lat, int j_max,
                                         double defect, double slack = 0.05);

/// Smoothstep frequency cutoff eta: 0 where |phi^| <= eps/2, 1 where
/// |phi^| >= eps, cubic in between; psi^ = eta phi^.
double cutoff_value(const WindowSpec& w, double eps, double xi1, double xi2);
double eval_psi_hat(const WindowSpec& w, double eps, double xi1, double xi2);

/// Modified multiplier m~ and the data needed for approximate reconstruction.
struct DualWindow {
  WindowSpec base;
  CoarseWindowSpec coarse;
  double epsilon = 0.0;
  int j_max = 0;
  SymbolField m_tilde;
  double star_norm = 0.0;  // star-norm estimate of |phi^|
  double a_tilde = 0.0;    // cover_min - eps * star_norm, > 0
};

/// Requires eps * ||phi^||_* < min of the covering symbol on the grid;
/// throws "cutoff too large" otherwise.
DualWindow build_dual(const WindowSpec& w, const CoarseWindowSpec& w0, double eps,
                      const FreqGrid& grid, int j_max);

/// Coefficients of a frequency field against the psi packets (coarse part
/// unchanged); used by the approximate expansion.
CoefficientSet analyze_dual(const Field& f, const DualWindow& dual,
                            const Lattice& lat, AnalysisPath path = AnalysisPath::Fast);

struct ReconstructionReport {
  double rel_error = 0.0;  // ||f - f~|| / ||f||
  double bound = 0.0;      // defect / a_tilde
  double defect = 0.0;
  double a_tilde = 0.0;
};

/// f~ = |lat| sum <M_{1/m~} f, psi_idx> phi_idx (coarse part with phi0).
std::pair<Field, ReconstructionReport> approx_reconstruct(const Field& f,
                                                          const DualWindow& dual,
                                                          const Lattice& lat,
                                                          double defect,
                                                          AnalysisPath path = AnalysisPath::Fast);

/// Binary "WPC1" format: magic, u32 count, then records
/// (i32 j [0 = coarse], i32 k, i32 m1, i32 m2, f64 re, f64 im).
void save_coefficients(const CoefficientSet& c, const std::string& path);
CoefficientSet load_coefficients(const std::string& path);

}  // namespace parapack
