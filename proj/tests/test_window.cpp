#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "parapack/window.hpp"

using namespace parapack;

namespace {

// Independent oracle: Cramer's rule in extended precision for the 4x4
// moment system of the reference design.
std::array<long double, 4> fig_amplitudes_cramer() {
  using LD = long double;
  const std::array<LD, 4> centers{1.0L, 0.5L, 0.25L, 0.0L};
  LD m[4][4];
  for (int c = 0; c < 4; ++c) {
    auto d = gaussian_derivatives_at_zero<LD>(1.0L, centers[c], 3);
    for (int r = 0; r < 4; ++r) m[r][c] = d[r];
  }
  LD rhs[4];
  {
    auto d = gaussian_derivatives_at_zero<LD>(0.01L, 10.0L, 3);
    for (int r = 0; r < 4; ++r) rhs[r] = -d[r];
  }
  auto det4 = [](const LD a[4][4]) {
    LD total = 0;
    int perm[4] = {0, 1, 2, 3};
    // expansion by minors on the first row
    auto det3 = [](LD x00, LD x01, LD x02, LD x10, LD x11, LD x12, LD x20,
                   LD x21, LD x22) {
      return x00 * (x11 * x22 - x12 * x21) - x01 * (x10 * x22 - x12 * x20) +
             x02 * (x10 * x21 - x11 * x20);
    };
    (void)perm;
    LD sign = 1;
    for (int c = 0; c < 4; ++c) {
      LD sub[3][3];
      for (int r = 1; r < 4; ++r) {
        int cc = 0;
        for (int k = 0; k < 4; ++k) {
          if (k == c) continue;
          sub[r - 1][cc++] = a[r][k];
        }
      }
      total += sign * a[0][c] *
               det3(sub[0][0], sub[0][1], sub[0][2], sub[1][0], sub[1][1],
                    sub[1][2], sub[2][0], sub[2][1], sub[2][2]);
      sign = -sign;
    }
    return total;
  };
  const LD d0 = det4(m);
  std::array<LD, 4> out{};
  for (int c = 0; c < 4; ++c) {
    LD mc[4][4];
    for (int r = 0; r < 4; ++r) {
      for (int k = 0; k < 4; ++k) mc[r][k] = (k == c) ? rhs[r] : m[r][k];
    }
    out[c] = det4(mc) / d0;
  }
  return out;
}

}  // namespace

TEST_CASE("reference design reproduces the published amplitudes") {
  const WindowSpec& w = testing::fig_window();
  REQUIRE(w.terms.size() == 5);
  CHECK(w.terms[0].amplitude == 1.0);
  const double expected[4] = {0.578, -3.45205, 4.66167, -2.27129};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(w.terms[i + 1].amplitude - expected[i]) <=
          5e-3 * std::abs(expected[i]));
  }
  auto moments = window_moments(w, 3);
  for (double m : moments) CHECK(std::abs(m) <= 1e-8);
}

TEST_CASE("design agrees with an extended-precision Cramer solve") {
  const WindowSpec& w = testing::fig_window();
  const auto oracle = fig_amplitudes_cramer();
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(w.terms[i + 1].amplitude - static_cast<double>(oracle[i])) <=
          1e-6 * std::abs(static_cast<double>(oracle[i])));
  }
}

TEST_CASE("single corrector at order zero is a one-equation solve") {
  GaussianTerm main{1.0, 3.0, 0.5, 1.0};
  std::vector<GaussianTerm> corr{{0.0, 1.0, 2.0, 1.0}};
  const WindowSpec w = design_window(main, corr, 0);
  const double main0 = std::exp(-0.5 * 9.0);
  const double corr0 = std::exp(-2.0 * 1.0);
  CHECK(w.terms[1].amplitude == doctest::Approx(-main0 / corr0).epsilon(1e-12));
  CHECK(std::abs(w(0.0, 0.0)) <= 1e-14);
}

TEST_CASE("overdetermined corrector sets take the minimum-norm solution") {
  GaussianTerm main{1.0, 4.0, 0.25, 1.0};
  std::vector<GaussianTerm> corr;
  for (double c : {0.0, 0.3, 0.6, 0.9, 1.2, 1.5}) corr.push_back({0.0, c, 1.0, 1.0});
  const WindowSpec w = design_window(main, corr, 2);
  auto moments = window_moments(w, 2);
  for (double m : moments) CHECK(std::abs(m) <= 1e-8);
}

TEST_CASE("degenerate corrector placement is rejected") {
  GaussianTerm main{1.0, 10.0, 0.01, 1.0};
  std::vector<GaussianTerm> corr;
  for (int i = 0; i < 4; ++i) corr.push_back({0.0, 0.5, 1.0, 1.0});  // duplicates
  CHECK_THROWS_WITH(design_window(main, corr, 3), "degenerate corrector placement");
  CHECK_THROWS(design_window(main, {corr[0]}, 3));  // too few correctors
}

TEST_CASE("window evaluation") {
  const WindowSpec& w = testing::fig_window();
  CHECK(std::abs(w(0.0, 0.0)) <= 1e-10);
  // at the main center the correctors are ~e^{-81} and the main term is 1
  CHECK(w(10.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  WindowSpec single;
  single.terms.push_back({1.0, 0.0, 1.0, 1.0});
  CHECK(single(1.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  // bounded by the amplitude sum
  const double cap = w.amplitude_sum();
  for (int i = 0; i < 200; ++i) {
    const double u = -30.0 + 0.37 * i;
    const double v = -50.0 + 0.61 * i;
    CHECK(std::abs(w(u, v)) <= cap);
  }
}

TEST_CASE("coarse window evaluation") {
  CHECK(CoarseWindowSpec{10000.0}(0.0, 0.0) == 1.0);
  CHECK(CoarseWindowSpec{10000.0}(100.0, 0.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(CoarseWindowSpec{1.0}(1.0, 1.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("moment annihilation agrees with central finite differences") {
  const WindowSpec& w = testing::fig_window();
  const double h = 1e-3;
  auto g = [&](double t) { return w(t, 0.0); };
  // central stencils for orders 0..3
  const double fd[4] = {
      g(0.0),
      (g(h) - g(-h)) / (2 * h),
      (g(h) - 2 * g(0.0) + g(-h)) / (h * h),
      (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h)};
  auto analytic = window_moments(w, 3);
  for (int n = 0; n <= 3; ++n) {
    // scale of the n-th derivative contribution
    double scale = 0.0;
    for (const auto& term : w.terms) {
      auto d = gaussian_derivatives_at_zero<double>(term.width1, term.center, n);
      scale += std::abs(term.amplitude * d[n]);
    }
    CHECK(std::abs(analytic[n]) <= 1e-8);
    CHECK(std::abs(fd[n] - analytic[n]) <= 1e-4 * std::max(scale, 1.0));
  }
}

TEST_CASE("separability for shared xi2 widths") {
  const WindowSpec& w = testing::fig_window();
  const double w2 = w.terms[0].width2;
  for (int i = 0; i < 50; ++i) {
    const double u = -12.0 + 0.5 * i;
    const double v = -25.0 + i;
    const double lhs = w(u, v);
    const double rhs = w(u, 0.0) * std::exp(-w2 * v * v);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("decay assumptions report") {
  // pure Gaussian with no vanishing moments: varsigma ~ 0, requirement fails
  WindowSpec plain;
  plain.terms.push_back({1.0, 0.0, 1.0, 1.0});
  const DecayReport r0 = verify_decay_assumptions(plain, 8.0, 128);
  CHECK(r0.varsigma < 0.5);
  CHECK_FALSE(r0.varsigma_above_two);

  // the designed window has four vanishing moments: slope >= 3
  const DecayReport r1 = verify_decay_assumptions(testing::fig_window(), 120.0, 256);
  CHECK(r1.varsigma >= 3.0);
  CHECK(r1.varsigma_above_two);
  CHECK(r1.delta > 0.0);
  CHECK(r1.max_ratio > 0.0);

  // scaling the amplitudes leaves the fitted exponents alone
  WindowSpec scaled = testing::fig_window();
  for (auto& t : scaled.terms) t.amplitude *= 7.5;
  const DecayReport r2 = verify_decay_assumptions(scaled, 120.0, 256);
  CHECK(r2.varsigma == doctest::Approx(r1.varsigma).epsilon(1e-6));
  CHECK(r2.delta == doctest::Approx(r1.delta).epsilon(0.05));
}

TEST_CASE("window file round trip and errors") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "parapack_window_test";
  fs::create_directories(dir);

  WindowFile wf;
  wf.window = testing::fig_window();
  wf.coarse = testing::fig_coarse();
  wf.has_coarse = true;
  const std::string path = (dir / "win.txt").string();
  save_window_file(wf, path);
  const WindowFile back = load_window_file(path);
  REQUIRE(back.window.terms.size() == wf.window.terms.size());
  CHECK(back.window.moment_order == 3);
  CHECK(back.has_coarse);
  CHECK(back.coarse.sigma == wf.coarse.sigma);
  for (std::size_t i = 0; i < wf.window.terms.size(); ++i) {
    CHECK(back.window.terms[i].amplitude == wf.window.terms[i].amplitude);
    CHECK(back.window.terms[i].center == wf.window.terms[i].center);
    CHECK(back.window.terms[i].width1 == wf.window.terms[i].width1);
    CHECK(back.window.terms[i].width2 == wf.window.terms[i].width2);
  }

  // comments and stray whitespace are fine
  {
    std::FILE* f = std::fopen((dir / "ok.txt").string().c_str(), "w");
    std::fputs("# comment\n [meta] \n moment_order = 1 # trailing\n[term]\n"
               "amplitude=2\ncenter = 0.5\nwidth1 = 1\nwidth2 = 2\n",
               f);
    std::fclose(f);
    const WindowFile ok = load_window_file((dir / "ok.txt").string());
    CHECK(ok.window.terms.size() == 1);
    CHECK(ok.window.terms[0].amplitude == 2.0);
    CHECK(ok.window.moment_order == 1);
  }

  // malformed numeric: FormatError with a byte offset
  {
    std::FILE* f = std::fopen((dir / "bad.txt").string().c_str(), "w");
    std::fputs("[term]\namplitude = abc\n", f);
    std::fclose(f);
    CHECK_THROWS_AS(load_window_file((dir / "bad.txt").string()), FormatError);
  }
  {
    std::FILE* f = std::fopen((dir / "bad2.txt").string().c_str(), "w");
    std::fputs("[nope]\nx = 1\n", f);
    std::fclose(f);
    CHECK_THROWS_AS(load_window_file((dir / "bad2.txt").string()), FormatError);
  }
}
