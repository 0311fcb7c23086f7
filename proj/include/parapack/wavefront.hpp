#pragma once

#include <string>
#include <vector>

#include "parapack/field.hpp"
#include "parapack/geometry.hpp"
#include "parapack/transform.hpp"
#include "parapack/window.hpp"

namespace parapack {

/// Spatial location plus frequency direction, theta normalized to [0, 2pi).
struct PhaseSpacePoint {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double theta = 0.0;
};

PhaseSpacePoint make_phase_point(double x1, double x2, double theta);

/// Per-scale packet selection: the rotation slot k_j with
/// 2 pi k_j / 2^j <= 2 pi - theta <= 2 pi (k_j + 1) / 2^j (ties resolved to
/// the smaller k) and the lattice point nearest to A_{j,k_j} x0.
struct GridParams {
  int k = 0;
  Eigen::Vector2i m{0, 0};
  Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
};

GridParams grid_params(const PhaseSpacePoint& p, const Lattice& lat, int j);

/// Spatial packet value 8^{j/2} phi(A_{j,k} x - lambda), with phi the exact
/// inverse transform of the Gaussian-sum window.
Complex packet_spatial(const WindowSpec& w, int j, int k,
                       const Eigen::Vector2d& lambda, const Eigen::Vector2d& x);

struct ProbeRecord {
  int j = 0;
  int k = 0;
  Eigen::Vector2i m{0, 0};
  double abs_coeff = 0.0;
  double log4_abs = 0.0;
};

struct DecayProbe {
  PhaseSpacePoint point;
  std::vector<ProbeRecord> records;
  double rate = 0.0;       // slope of log4|c_j| against -j; +inf when all below floor
  int j_usable_hi = 0;     // finest scale the grid can represent
};

/// Coefficients <f, packet_j> for j in [j_lo, j_hi] along the grid parameters
/// of p, by spatial quadrature against exact packet values, plus the fitted
/// decay rate (least squares over coefficients above 1e-14).
DecayProbe decay_probe(const Field& spatial, const PhaseSpacePoint& p,
                       const Lattice& lat, int j_lo, int j_hi, const WindowSpec& w);

/// Same probe against the approximate-expansion coefficients
/// <M_{1/m~} f, psi_j>: the multiplier is applied on the frequency grid, the
/// psi inner product splits into an exact spatial part against phi and a
/// frequency-grid correction supported on the cutoff fringe.
DecayProbe decay_probe_dual(const Field& spatial, const PhaseSpacePoint& p,
                            const Lattice& lat, int j_lo, int j_hi,
                            const DualWindow& dual);

double sobolev_statistic(const DecayProbe& probe, double s);

struct WavefrontOptions {
  int nx = 4, ny = 4;        // spatial probe grid (over probe_box_fraction * extent)
  int n_angles = 16;
  double probe_box_fraction = 0.5;
  int j_lo = 1, j_hi = 5;
  double s = 1.0;            // tested Sobolev order
  double threshold = 1e-6;   // on sum |c_j|^2 4^{2js} / ||f||^2
  bool use_dual = false;     // probe the approximate coefficients instead
};

struct WavefrontMap {
  std::vector<PhaseSpacePoint> probes;  // probe p, angle a -> probes[p*n_angles+a]
  std::vector<double> statistics;
  std::vector<bool> flagged;            // true = not regular at order s
  WavefrontOptions options;
  double f_norm = 0.0;

  /// 0/1 classification as a square field: requires nx*ny == n_angles;
  /// samples(a, p) = 1 when probe p at angle a is flagged.
  Field classification() const;
};

WavefrontMap wavefront_map(const Field& spatial, const Lattice& lat,
                           const WindowSpec& w, const WavefrontOptions& opts,
                           const DualWindow* dual = nullptr);

void save_probe_report(const DecayProbe& probe, const std::string& path);

enum class SignalKind { Bump, Edge, Corner };

struct SignalParams {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 1.0;
  double angle = 0.0;         // edge/corner normal direction
  double angle2 = M_PI / 2;   // second corner normal
};

/// Deterministic synthetic signals: Gaussian bump; half-plane indicator times
/// a Gaussian window (normal `angle`, line through `center`); wedge given by
/// the min of two half-plane indicators.
Field make_test_signal(SignalKind kind, const SignalParams& params, int n,
                       double extent);

}  // namespace parapack
