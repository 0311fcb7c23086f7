#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace parapack {

/// One anisotropic Gaussian in frequency:
///   amplitude * exp(-(width1*(xi1-center)^2 + width2*xi2^2)).
template <typename Scalar>
struct GaussianTermT {
  Scalar amplitude = 1;
  Scalar center = 0;
  Scalar width1 = 1;  // xi1 exponent coefficient, > 0
  Scalar width2 = 1;  // xi2 exponent coefficient, > 0
};

/// Frequency-side window phi^ as a finite sum of Gaussian terms, designed so
/// that phi^(0) and the first moment_order xi1-derivatives at 0 vanish.
template <typename Scalar>
struct WindowSpecT {
  std::vector<GaussianTermT<Scalar>> terms;
  int moment_order = 0;
  Scalar delta = 0;     // fitted Gaussian decay rate (bookkeeping)
  Scalar varsigma = 0;  // fitted vanishing order at the origin (bookkeeping)

  Scalar operator()(Scalar xi1, Scalar xi2) const {
    Scalar acc = 0;
    for (const auto& g : terms) {
      const Scalar d = xi1 - g.center;
      acc += g.amplitude * std::exp(-(g.width1 * d * d + g.width2 * xi2 * xi2));
    }
    return acc;
  }

  Scalar amplitude_sum() const {
    Scalar acc = 0;
    for (const auto& g : terms) acc += std::abs(g.amplitude);
    return acc;
  }
};

using GaussianTerm = GaussianTermT<double>;
using WindowSpec = WindowSpecT<double>;

/// Coarse window phi0^(xi) = exp(-|xi|^2 / sigma).
struct CoarseWindowSpec {
  double sigma = 1.0;

  double operator()(double xi1, double xi2) const {
    return std::exp(-(xi1 * xi1 + xi2 * xi2) / sigma);
  }
};

inline double eval_phi_hat(const WindowSpec& w, double xi1, double xi2) {
  return w(xi1, xi2);
}
inline double eval_phi0_hat(const CoarseWindowSpec& w0, double xi1, double xi2) {
  return w0(xi1, xi2);
}

/// n-th derivative of exp(-c (t - t0)^2) at t = 0, n = 0..n_max, via the
/// Hermite recurrence H_{n+1}(u) = 2u H_n(u) - 2n H_{n-1}(u).
template <typename Scalar>
std::vector<Scalar> gaussian_derivatives_at_zero(Scalar c, Scalar t0, int n_max) {
  const Scalar rc = std::sqrt(c);
  const Scalar u0 = -rc * t0;
  const Scalar e = std::exp(-c * t0 * t0);
  std::vector<Scalar> h(n_max + 1);
  h[0] = 1;
  if (n_max >= 1) h[1] = 2 * u0;
  for (int n = 1; n < n_max; ++n) h[n + 1] = 2 * u0 * h[n] - Scalar(2 * n) * h[n - 1];
  std::vector<Scalar> out(n_max + 1);
  Scalar rcn = 1;
  Scalar sign = 1;
  for (int n = 0; n <= n_max; ++n) {
    out[n] = sign * rcn * h[n] * e;
    rcn *= rc;
    sign = -sign;
  }
  return out;
}

/// xi1-derivatives of phi^ at the origin, orders 0..n_max.
template <typename Scalar>
std::vector<Scalar> window_moments(const WindowSpecT<Scalar>& w, int n_max) {
  std::vector<Scalar> acc(n_max + 1, Scalar(0));
  for (const auto& g : w.terms) {
    auto d = gaussian_derivatives_at_zero<Scalar>(g.width1, g.center, n_max);
    for (int n = 0; n <= n_max; ++n) acc[n] += g.amplitude * d[n];
  }
  return acc;
}

/// Solve for corrector amplitudes so the combined window annihilates the
/// moments of order 0..n. The main term keeps amplitude 1; at least n+1
/// correctors are required (minimum-norm solution when there are more).
/// Throws "degenerate corrector placement" when the moment matrix has
/// condition number above 1e12.
template <typename Scalar>
WindowSpecT<Scalar> design_window(const GaussianTermT<Scalar>& main,
                                  const std::vector<GaussianTermT<Scalar>>& correctors,
                                  int n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (n < 0) throw std::invalid_argument("design_window: moment order must be >= 0");
  const int nc = static_cast<int>(correctors.size());
  if (nc < n + 1) {
    throw std::invalid_argument("design_window: need at least n+1 correctors");
  }
  Mat m(n + 1, nc);
  for (int c = 0; c < nc; ++c) {
    auto d = gaussian_derivatives_at_zero<Scalar>(correctors[c].width1,
                                                  correctors[c].center, n);
    for (int row = 0; row <= n; ++row) m(row, c) = d[row];
  }
  Vec rhs(n + 1);
  {
    auto d = gaussian_derivatives_at_zero<Scalar>(main.width1, main.center, n);
    for (int row = 0; row <= n; ++row) rhs(row) = -Scalar(main.amplitude) * d[row];
  }
  Eigen::JacobiSVD<Mat> svd(m);
  const Scalar smax = svd.singularValues()(0);
  const Scalar smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0) || smax / smin > Scalar(1e12)) {
    throw std::runtime_error("degenerate corrector placement");
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(m);
  Vec a = cod.solve(rhs);

  WindowSpecT<Scalar> w;
  w.moment_order = n;
  GaussianTermT<Scalar> main1 = main;
  main1.amplitude = 1;
  w.terms.push_back(main1);
  for (int c = 0; c < nc; ++c) {
    GaussianTermT<Scalar> g = correctors[c];
    g.amplitude = a(c);
    w.terms.push_back(g);
  }
  auto res = window_moments(w, n);
  for (const Scalar& v : res) {
    if (!(std::abs(v) <= Scalar(1e-8))) {
      throw std::runtime_error("degenerate corrector placement");
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Decay assumptions: |phi^(xi)| <~ min(1, |xi1|^varsigma) e^{-delta |xi|^2}.
// ---------------------------------------------------------------------------

struct DecayReport {
  double delta = 0.0;      // largest Gaussian rate supported by the samples
  double varsigma = 0.0;   // near-origin vanishing order (log-log slope)
  double max_ratio = 0.0;  // sup |phi^| / (min(1,|xi1|^varsigma) e^{-delta |xi|^2})
  bool varsigma_above_two = false;
};

DecayReport verify_decay_assumptions(const WindowSpec& w, double extent, int grid_n);

// ---------------------------------------------------------------------------
// Window spec files: line-based key-value text with [meta], [phi0] and
// repeated [term] sections; '#' starts a comment.
// ---------------------------------------------------------------------------

struct WindowFile {
  WindowSpec window;
  CoarseWindowSpec coarse;
  bool has_coarse = false;
};

void save_window_file(const WindowFile& wf, const std::string& path);
WindowFile load_window_file(const std::string& path);

}  // namespace parapack
