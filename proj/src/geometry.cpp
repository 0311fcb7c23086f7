#include "parapack/geometry.hpp"

#include <algorithm>

namespace parapack {

Lattice dual_lattice(const Lattice& lat) {
  return Lattice(lat.generator().inverse().transpose());
}

std::vector<Eigen::Vector2i> lattice_enumerate(const Lattice& lat, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("lattice_enumerate: radius > 0");
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(lat.generator());
  const double smin = svd.singularValues()(1);
  const int mmax = static_cast<int>(std::ceil(radius / smin)) + 1;
  std::vector<Eigen::Vector2i> out;
  const double r2 = radius * radius;
  for (int m1 = -mmax; m1 <= mmax; ++m1) {
    for (int m2 = -mmax; m2 <= mmax; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      const Eigen::Vector2d p = lat.point({m1, m2});
      if (p.squaredNorm() <= r2) out.push_back({m1, m2});
    }
  }
  return out;
}

Eigen::Vector2i nearest_lattice_point(const Lattice& lat, const Eigen::Vector2d& y) {
  const Eigen::Vector2d c = lat.generator().inverse() * y;
  const int b1 = static_cast<int>(std::lround(c(0)));
  const int b2 = static_cast<int>(std::lround(c(1)));
  Eigen::Vector2i best(b1, b2);
  double best_d = (lat.point(best) - y).squaredNorm();
  for (int d1 = -2; d1 <= 2; ++d1) {
    for (int d2 = -2; d2 <= 2; ++d2) {
      const Eigen::Vector2i cand(b1 + d1, b2 + d2);
      const double d = (lat.point(cand) - y).squaredNorm();
      if (d < best_d - 1e-15 * (1.0 + best_d)) {
        best = cand;
        best_d = d;
      } else if (std::abs(d - best_d) <= 1e-15 * (1.0 + best_d)) {
        if (cand(0) < best(0) || (cand(0) == best(0) && cand(1) < best(1))) {
          best = cand;
        }
      }
    }
  }
  return best;
}

int rotated_box_overlap_count(int r, int t, int j_max,
                              const std::vector<double>& angles,
                              int samples_per_axis) {
  if (static_cast<int>(angles.size()) < j_max) {
    throw std::invalid_argument("rotated_box_overlap_count: need one angle per scale");
  }
  for (int j = 1; j <= j_max; ++j) {
    const double lim = 2.0 * M_PI * std::pow(2.0, -j);
    if (std::abs(angles[j - 1]) > lim * (1.0 + 1e-12)) {
      throw std::invalid_argument("rotated_box_overlap_count: angle out of range");
    }
  }
  const double u_lo = std::pow(4.0, r - 1), u_hi = std::pow(4.0, r);
  const double v_lo = std::pow(2.0, t - 1), v_hi = std::pow(2.0, t);
  Sector box{Sector::Kind::DyadicBox, r, t, 0};

  int best = 0;
  const int ns = std::max(2, samples_per_axis);
  for (int j0 = 1; j0 <= j_max; ++j0) {
    const Eigen::Matrix2d m =
        rotation_matrix(angles[j0 - 1]) * dilation_matrix<double>(j0);
    // W is symmetric under xi -> -xi, so two sign components suffice.
    for (int sv = 0; sv < 2; ++sv) {
      for (int iu = 0; iu < ns; ++iu) {
        const double u = u_lo + (u_hi - u_lo) * (iu + 0.5) / ns;
        for (int iv = 0; iv < ns; ++iv) {
          double v = v_lo + (v_hi - v_lo) * (iv + 0.5) / ns;
          if (sv) v = -v;
          const Eigen::Vector2d xi = m * Eigen::Vector2d(u, v);
          int count = 0;
          for (int j = 1; j <= j_max; ++j) {
            const Eigen::Vector2d y = dilation_matrix<double>(j).inverse() *
                                      (rotation_matrix(-angles[j - 1]) * xi);
            if (box.contains(y(0), y(1))) ++count;
          }
          best = std::max(best, count);
        }
      }
    }
  }
  return best;
}

}  // namespace parapack
