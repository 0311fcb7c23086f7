#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parapack/geometry.hpp"

using namespace parapack;

TEST_CASE("dilation matrix") {
  CHECK(dilation_matrix<double>(0).isApprox(Eigen::Matrix2d::Identity()));
  Eigen::Matrix2d d1;
  d1 << 4, 0, 0, 2;
  CHECK(dilation_matrix<double>(1).isApprox(d1));
  Eigen::Matrix2d d3;
  d3 << 64, 0, 0, 8;
  CHECK(dilation_matrix<double>(3).isApprox(d3));
  CHECK_THROWS(dilation_matrix<double>(-1));
}

TEST_CASE("packet matrices") {
  Eigen::Matrix2d a10;
  a10 << 4, 0, 0, 2;
  CHECK(packet_matrix<double>({1, 0}).isApprox(a10));

  Eigen::Matrix2d a11;
  a11 << -4, 0, 0, -2;
  CHECK(packet_matrix<double>({1, 1}).isApprox(a11, 1e-12));

  for (int j = 1; j <= 6; ++j) {
    for (int k = 0; k < (1 << j); k += std::max(1, (1 << j) / 8)) {
      const ParabolicIndex idx{j, k};
      const Eigen::Matrix2d a = packet_matrix<double>(idx);
      const Eigen::Matrix2d b = packet_dual_matrix<double>(idx);
      CHECK((a * b.transpose() - Eigen::Matrix2d::Identity()).norm() < 1e-12);
      CHECK(b.determinant() == doctest::Approx(std::pow(8.0, -j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dual lattice") {
  const Lattice scaled(Eigen::Matrix2d::Identity() * 2.5);
  CHECK(dual_lattice(scaled).generator().isApprox(
      Eigen::Matrix2d::Identity() / 2.5, 1e-14));

  Eigen::Matrix2d shear;
  shear << 1, 1, 0, 1;
  Eigen::Matrix2d expected;
  expected << 1, 0, -1, 1;
  CHECK(dual_lattice(Lattice(shear)).generator().isApprox(expected, 1e-14));

  Eigen::Matrix2d skew;
  skew << 0.7, 0.2, -0.3, 1.4;
  const Lattice lat(skew);
  CHECK((dual_lattice(dual_lattice(lat)).generator() - skew).norm() < 1e-12);

  CHECK(lat.volume() == doctest::Approx(std::abs(skew.determinant())));
  auto [a, b] = lat.parameters();
  CHECK(a * b == doctest::Approx(lat.volume()).epsilon(1e-12));

  Eigen::Matrix2d sing;
  sing << 1, 2, 2, 4;
  CHECK_THROWS_WITH(Lattice(sing), "degenerate lattice");
}

TEST_CASE("lattice enumeration") {
  const Lattice unit(Eigen::Matrix2d::Identity());
  CHECK(lattice_enumerate(unit, 1.0).size() == 4);
  CHECK(lattice_enumerate(unit, 1.5).size() == 8);
  const Lattice half(Eigen::Matrix2d::Identity() * 0.5);
  CHECK(lattice_enumerate(half, 0.6).size() == 4);

  // deterministic lexicographic order
  auto pts = lattice_enumerate(unit, 1.5);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const bool ordered = pts[i - 1](0) < pts[i](0) ||
                         (pts[i - 1](0) == pts[i](0) && pts[i - 1](1) < pts[i](1));
    CHECK(ordered);
  }
}

TEST_CASE("nearest lattice point ties") {
  const Lattice unit(Eigen::Matrix2d::Identity());
  // (0.5, 0.5) is equidistant from four points; lexicographic tie-break
  const Eigen::Vector2i m = nearest_lattice_point(unit, {0.5, 0.5});
  CHECK(m(0) == 0);
  CHECK(m(1) == 0);
  const Eigen::Vector2i m2 = nearest_lattice_point(unit, {1.2, -0.7});
  CHECK(m2(0) == 1);
  CHECK(m2(1) == -1);
}

TEST_CASE("star norm of zero function") {
  auto zero = [](double, double) { return 0.0; };
  CHECK(star_norm_estimate(zero, 10.0, 32, 4).value == 0.0);
}

TEST_CASE("star norm of sector indicators scales like 4^t") {
  // brute-force sweep over t; the constant is a frozen regression value
  std::vector<double> est;
  for (int t = 0; t <= 3; ++t) {
    Sector v{Sector::Kind::CircularSector, 0, t, 0};
    auto ind = [&](double u, double w) { return v.contains(u, w) ? 1.0 : 0.0; };
    // images live in annuli up to 2 rho(2^{-t-1}, j); cover scales 1..6
    const double alpha = std::pow(2.0, -(t + 1));
    const double rho6 = std::sqrt(alpha * alpha * std::pow(4.0, 12) +
                                  (1 - alpha * alpha) * std::pow(2.0, 12));
    const double extent = 2.2 * rho6;
    est.push_back(star_norm_estimate(ind, extent, 1024, 8).value);
  }
  for (int t = 0; t <= 3; ++t) {
    CHECK(est[t] > 0.0);
    // single constant across t (recorded from the first run of this sweep)
    CHECK(est[t] / std::pow(4.0, t) <= 12.0);
  }
  // ratio law: estimate(t+1)/estimate(t) <= 4 (1 + grid slack)
  for (int t = 0; t < 3; ++t) {
    CHECK(est[t + 1] / est[t] <= 4.0 * 1.25);
  }
}

TEST_CASE("star norm finite and stable for decaying profile") {
  auto f = [](double u, double v) {
    const double r = std::hypot(u, v);
    return std::pow(std::abs(u), 2.5) * std::exp(-r);
  };
  const double e6 = star_norm_estimate(f, 40.0, 512, 6).value;
  const double e8 = star_norm_estimate(f, 40.0, 512, 8).value;
  CHECK(e8 > 0.0);
  CHECK(std::abs(e8 - e6) / e8 < 0.01);
}

TEST_CASE("star norm symmetry invariance") {
  // asymmetric profile; the dilation-rotation orbit treats the four axis
  // symmetries identically, and a symmetric midpoint grid samples mirrored
  // points exactly
  auto base = [](double u, double v) {
    return std::pow(std::abs(u), 3.0) * std::exp(-(u - 1) * (u - 1) - (v - 0.5) * (v - 0.5));
  };
  const double ref = star_norm_estimate(base, 30.0, 128, 5).value;
  for (int s = 1; s < 4; ++s) {
    auto flipped = [&](double u, double v) {
      return base(s & 1 ? -u : u, s & 2 ? -v : v);
    };
    const double val = star_norm_estimate(flipped, 30.0, 128, 5).value;
    CHECK(val == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("star norm gaussian tail bound") {
  GaussianEnvelope env{1.0, 3.0, 0.5};
  auto f = [](double u, double v) {
    return std::min(1.0, std::pow(std::abs(u), 3.0)) * std::exp(-0.5 * (u * u + v * v));
  };
  const auto r8 = star_norm_estimate(f, 20.0, 256, 8, &env);
  const auto r10 = star_norm_estimate(f, 20.0, 256, 10, &env);
  CHECK(r8.tail_bound > 0.0);
  // the dropped scales are genuinely below the reported bound
  CHECK(r10.value - r8.value <= r8.tail_bound + 1e-15);
  CHECK(r10.tail_bound < r8.tail_bound);
}

TEST_CASE("sector membership") {
  Sector v{Sector::Kind::CircularSector, 0, 0, 0};
  CHECK(v.contains(1.5, 0.1));
  CHECK_FALSE(v.contains(-1.5, 0.1));  // first-quadrant template
  Sector vflip{Sector::Kind::CircularSector, 0, 0, 1};
  CHECK(vflip.contains(-1.5, 0.1));
  Sector w{Sector::Kind::DyadicBox, 1, 2, 0};
  CHECK(w.contains(2.0, 3.0));
  CHECK(w.contains(-2.0, -3.0));
  CHECK_FALSE(w.contains(0.1, 3.0));
}

TEST_CASE("rotated box overlaps") {
  std::vector<double> zeros(8, 0.0);

  CHECK(rotated_box_overlap_count(0, 0, 1, zeros, 32) <= 1);

  // constant across r, t in {-2..2}; value frozen from the first sweep
  int c00 = rotated_box_overlap_count(0, 0, 8, zeros, 32);
  CHECK(c00 >= 1);
  for (int r = -2; r <= 2; ++r) {
    for (int t = -2; t <= 2; ++t) {
      CHECK(rotated_box_overlap_count(r, t, 8, zeros, 32) <= 3);
    }
  }

  // refinement never decreases the count and stabilizes
  const int a = rotated_box_overlap_count(0, 0, 8, zeros, 8);
  const int b = rotated_box_overlap_count(0, 0, 8, zeros, 32);
  const int c = rotated_box_overlap_count(0, 0, 8, zeros, 64);
  CHECK(a <= b);
  CHECK(b <= c);
  CHECK(c == rotated_box_overlap_count(0, 0, 8, zeros, 96));

  // per-scale angles within the allowed range, including the extremes
  std::vector<double> angles;
  for (int j = 1; j <= 8; ++j) angles.push_back(2.0 * M_PI * std::pow(2.0, -j));
  CHECK(rotated_box_overlap_count(0, 0, 8, angles, 32) <= 3);
  angles[2] *= 2.0;  // out of range for j = 3
  CHECK_THROWS(rotated_box_overlap_count(0, 0, 8, angles, 32));
}

TEST_CASE("fundamental radius bounds nearest-point distance") {
  Eigen::Matrix2d g;
  g << 0.9, 0.35, -0.2, 1.1;
  const Lattice lat(g);
  const double big_l = lat.fundamental_radius();
  for (int i = 0; i < 40; ++i) {
    for (int k = 0; k < 40; ++k) {
      const Eigen::Vector2d y(-3.0 + 6.0 * i / 39.0, -3.0 + 6.0 * k / 39.0);
      const Eigen::Vector2i m = nearest_lattice_point(lat, y);
      CHECK((lat.point(m) - y).norm() <= big_l + 1e-12);
    }
  }
}
