#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "parapack/geometry.hpp"
#include "parapack/window.hpp"

namespace parapack {

/// Endpoint grid on [-extent, extent)^2: points -extent + i * (2*extent/n).
/// Doubling n keeps all previous points, so refined extrema are monotone.
struct FreqGrid {
  double extent = 1.0;
  int n = 256;

  double spacing() const { return 2.0 * extent / n; }
  double coord(int i) const { return -extent + i * spacing(); }
};

/// Covering symbol m(xi) = |phi0^(xi)|^2 + sum_{j<=j_max} sum_k |phi^(B_{j,k} xi)|^2
/// sampled on a grid; its grid extrema estimate the covering constants.
struct SymbolField {
  Eigen::MatrixXd values;
  FreqGrid grid;
  int j_max = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  double tail_bound = 0.0;   // bound on the dropped j > j_max part (0 if not computed)
  bool under_resolved = false;  // grid spacing exceeds the narrowest band feature
};

SymbolField covering_symbol(const WindowSpec& w, const CoarseWindowSpec& w0,
                            const FreqGrid& grid, int j_max,
                            bool with_tail = false);

/// Correlation sup Theta(zeta): max over the grid of
///   |phi0^(xi)||phi0^(xi - zeta)| + sum_{j,k} |phi^(B xi)||phi^(B xi - zeta)|.
/// theta_sup(0) reproduces the covering-symbol maximum in the same arithmetic.
double theta_sup(const WindowSpec& w, const CoarseWindowSpec& w0,
                 const Eigen::Vector2d& zeta, const FreqGrid& grid, int j_max);

/// Least-squares Gaussian envelope Theta(zeta) <= c * exp(-tau |zeta|^2),
/// fitted on sampled radii/directions and inflated to dominate every sample.
struct EnvelopeFit {
  double c = 0.0;
  double tau = 0.0;
  double r2 = 0.0;
};

EnvelopeFit fit_correlation_envelope(const WindowSpec& w, const CoarseWindowSpec& w0,
                                     const FreqGrid& grid, int j_max,
                                     double r_min, double r_max, int n_radii = 8,
                                     int n_dirs = 8);

struct DefectResult {
  double value = 0.0;       // truncated sum over dual-lattice points
  double tail_bound = 0.0;  // certified bound on the dropped part
  int points_used = 0;
};

/// Daubechies-type defect Delta = sum_{gamma in dual \ 0} max(Theta(gamma),
/// Theta(-gamma)), truncated at |gamma| <= gamma_radius with an envelope tail
/// bound. With refined = true uses sqrt(Theta(gamma) Theta(-gamma)) instead.
/// Throws when the tail cannot be certified below 1e-6 * (partial + 1e-30),
/// suggesting a sufficient radius.
DefectResult frame_defect(const WindowSpec& w, const CoarseWindowSpec& w0,
                          const Lattice& lat, const FreqGrid& grid, int j_max,
                          double gamma_radius, const EnvelopeFit& envelope,
                          bool refined = false);

struct FrameCertificate {
  double cover_min = 0.0;  // A estimate
  double cover_max = 0.0;  // B estimate
  double defect = 0.0;     // Delta estimate
  double lower = 0.0;      // |lat|^{-1} (A - Delta)
  double upper = 0.0;      // |lat|^{-1} (B + Delta)
  bool valid = false;      // Delta < A
  int j_max = 0;
  double gamma_radius = 0.0;
  FreqGrid grid;
  double symbol_tail = 0.0;
  double defect_tail = 0.0;
  EnvelopeFit envelope;
};

/// gamma_radius <= 0 selects the default 12 / sqrt(tau_fit).
FrameCertificate certify_frame(const WindowSpec& w, const CoarseWindowSpec& w0,
                               const Lattice& lat, const FreqGrid& grid, int j_max,
                               double gamma_radius = 0.0, bool refined = false);

void save_certificate(const FrameCertificate& c, const std::string& path);
FrameCertificate load_certificate(const std::string& path);

/// Fit log Delta ~ log(prefactor) - tau / a^2 on a sweep of square lattices
/// (a = b). Nonpositive Delta values are dropped; fewer than 3 usable points
/// is an error.
struct DecayLawFit {
  double tau = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

DecayLawFit fit_defect_decay(const std::vector<std::array<double, 3>>& sweep);

}  // namespace parapack
