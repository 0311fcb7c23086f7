#pragma once

// Shared window fixtures for the test suites.

#include "parapack/window.hpp"

namespace parapack::testing {

// Window of the reference design: main bump e^{-(t-10)^2/100} corrected by
// four unit-width Gaussians at 1, 0.5, 0.25, 0; three vanishing moments.
// Frequency profile in xi2 is e^{-xi2^2/1100}.
inline const WindowSpec& fig_window() {
  static const WindowSpec w = [] {
    GaussianTerm main{1.0, 10.0, 1.0 / 100.0, 1.0 / 1100.0};
    std::vector<GaussianTerm> corr;
    for (double c : {1.0, 0.5, 0.25, 0.0}) {
      corr.push_back({0.0, c, 1.0, 1.0 / 1100.0});
    }
    return design_window(main, corr, 3);
  }();
  return w;
}

// Coarse window whose squared modulus is e^{-|xi|^2/10000}, the profile the
// reference covering plot uses.
inline CoarseWindowSpec fig_coarse() { return CoarseWindowSpec{20000.0}; }

// fig_window with frequencies rescaled by 1/10 (xi -> 10 xi), putting the
// main bump at xi1 = 1. Covering constants are scale-invariant.
inline const WindowSpec& unit_window() {
  static const WindowSpec w = [] {
    GaussianTerm main{1.0, 1.0, 1.0, 100.0 / 1100.0};
    std::vector<GaussianTerm> corr;
    for (double c : {0.1, 0.05, 0.025, 0.0}) {
      corr.push_back({0.0, c, 100.0, 100.0 / 1100.0});
    }
    return design_window(main, corr, 3);
  }();
  return w;
}

inline CoarseWindowSpec unit_coarse() { return CoarseWindowSpec{200.0}; }

// Benign window for grid transforms: moderate width ratios so 128^2 grids
// resolve every retained band. Main bump at xi1 = 2.
inline const WindowSpec& bench_window() {
  static const WindowSpec w = [] {
    GaussianTerm main{1.0, 2.0, 2.0, 0.5};
    std::vector<GaussianTerm> corr;
    for (double c : {0.0, 0.4, 0.8, 1.2}) {
      corr.push_back({0.0, c, 2.0, 0.5});
    }
    return design_window(main, corr, 3);
  }();
  return w;
}

inline CoarseWindowSpec bench_coarse() { return CoarseWindowSpec{12.0}; }

// Probe window for wavefront tests: uniform xi1 widths (std 0.25) so spatial
// quadrature stays exact-ish across scales, fat in xi2 (std 3) so rotation
// quantization costs at most ~one angular width.
inline const WindowSpec& probe_window() {
  static const WindowSpec w = [] {
    GaussianTerm main{1.0, 1.0, 8.0, 1.0 / 18.0};
    std::vector<GaussianTerm> corr;
    for (double c : {0.0, 0.2, 0.4, 0.6}) {
      corr.push_back({0.0, c, 8.0, 1.0 / 18.0});
    }
    return design_window(main, corr, 3);
  }();
  return w;
}

inline CoarseWindowSpec probe_coarse() { return CoarseWindowSpec{2.0}; }

}  // namespace parapack::testing
