#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace parapack {

/// Fine-scale index: scale j >= 1 and rotation slot 0 <= k < 2^j.
struct ParabolicIndex {
  int j = 1;
  int k = 0;
};

inline bool valid_index(const ParabolicIndex& idx) {
  return idx.j >= 1 && idx.j < 31 && idx.k >= 0 && idx.k < (1 << idx.j);
}

inline double rotation_angle(const ParabolicIndex& idx) {
  return 2.0 * M_PI * idx.k / static_cast<double>(1 << idx.j);
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> rotation_matrix(Scalar theta) {
  Eigen::Matrix<Scalar, 2, 2> r;
  using std::cos;
  using std::sin;
  r << cos(theta), -sin(theta), sin(theta), cos(theta);
  return r;
}

/// diag(4^j, 2^j)
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> dilation_matrix(int j) {
  if (j < 0) throw std::invalid_argument("dilation_matrix: j must be >= 0");
  Eigen::Matrix<Scalar, 2, 2> d = Eigen::Matrix<Scalar, 2, 2>::Zero();
  d(0, 0) = std::pow(Scalar(4), j);
  d(1, 1) = std::pow(Scalar(2), j);
  return d;
}

/// A_{j,k} = D_j R_{2 pi k / 2^j}
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> packet_matrix(const ParabolicIndex& idx) {
  return dilation_matrix<Scalar>(idx.j) *
         rotation_matrix<Scalar>(Scalar(rotation_angle(idx)));
}

/// B_{j,k} = (A_{j,k}^T)^{-1} = D_j^{-1} R_{2 pi k / 2^j}
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> packet_dual_matrix(const ParabolicIndex& idx) {
  Eigen::Matrix<Scalar, 2, 2> dinv = Eigen::Matrix<Scalar, 2, 2>::Zero();
  dinv(0, 0) = std::pow(Scalar(4), -idx.j);
  dinv(1, 1) = std::pow(Scalar(2), -idx.j);
  return dinv * rotation_matrix<Scalar>(Scalar(rotation_angle(idx)));
}

/// Full-rank planar lattice generator P, with the points P * Z^2.
class Lattice {
 public:
  explicit Lattice(const Eigen::Matrix2d& generator) : p_(generator) {
    if (std::abs(p_.determinant()) < 1e-300) {
      throw std::invalid_argument("degenerate lattice");
    }
  }
  static Lattice rectangular(double a, double b) {
    Eigen::Matrix2d p = Eigen::Matrix2d::Zero();
    p(0, 0) = a;
    p(1, 1) = b;
    return Lattice(p);
  }

  const Eigen::Matrix2d& generator() const { return p_; }
  double volume() const { return std::abs(p_.determinant()); }
  Eigen::Vector2d point(const Eigen::Vector2i& m) const {
    return p_ * m.cast<double>();
  }

  /// Singular values of the generator, largest first.
  std::pair<double, double> parameters() const {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(p_);
    return {svd.singularValues()(0), svd.singularValues()(1)};
  }

  /// Circumradius of the fundamental parallelogram (half its long diagonal);
  /// bounds the distance from any point to the nearest lattice point.
  double fundamental_radius() const {
    const Eigen::Vector2d c0 = p_.col(0), c1 = p_.col(1);
    return 0.5 * std::max((c0 + c1).norm(), (c0 - c1).norm());
  }

 private:
  Eigen::Matrix2d p_;
};

/// Dual lattice, generated by (P^{-1})^T. dual(dual(L)) == L.
Lattice dual_lattice(const Lattice& lat);

/// All points P m, m in Z^2 \ {0}, with |P m| <= radius, ordered
/// lexicographically in (m1, m2) for reproducible truncated sums.
std::vector<Eigen::Vector2i> lattice_enumerate(const Lattice& lat, double radius);

/// Nearest lattice point to y (ties broken lexicographically in integer
/// coordinates). Searches a +-2 neighborhood of the rounded preimage, which
/// is exhaustive for moderately skewed generators.
Eigen::Vector2i nearest_lattice_point(const Lattice& lat, const Eigen::Vector2d& y);

// ---------------------------------------------------------------------------
// Star norm: sup_xi sum_{j>=1} sum_k |F(B_{j,k} xi)|, truncated at j_max and
// maximized over a symmetric midpoint grid on [-extent, extent]^2.
// ---------------------------------------------------------------------------

struct StarNormResult {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the dropped j > j_max part (0 if no envelope)
};

/// Decay envelope |F(xi)| <= amplitude * min(1, |xi1|^varsigma) e^{-tau|xi|^2},
/// used only to bound truncation tails.
struct GaussianEnvelope {
  double amplitude = 1.0;
  double varsigma = 3.0;
  double tau = 0.0;
};

template <class F>
StarNormResult star_norm_estimate(F&& f, double extent, int grid_n, int j_max,
                                  const GaussianEnvelope* envelope = nullptr) {
  if (grid_n < 2) throw std::invalid_argument("star_norm_estimate: grid_n >= 2");
  if (j_max < 1) throw std::invalid_argument("star_norm_estimate: j_max >= 1");
  const double h = 2.0 * extent / grid_n;
  double best = 0.0;
  std::vector<Eigen::Matrix2d> bs;
  for (int j = 1; j <= j_max; ++j) {
    for (int k = 0; k < (1 << j); ++k) {
      bs.push_back(packet_dual_matrix<double>({j, k}));
    }
  }
  for (int i2 = 0; i2 < grid_n; ++i2) {
    const double x2 = -extent + (i2 + 0.5) * h;
    for (int i1 = 0; i1 < grid_n; ++i1) {
      const double x1 = -extent + (i1 + 0.5) * h;
      double acc = 0.0;
      for (const auto& b : bs) {
        const double u = b(0, 0) * x1 + b(0, 1) * x2;
        const double v = b(1, 0) * x1 + b(1, 1) * x2;
        acc += std::abs(f(u, v));
      }
      if (acc > best) best = acc;
    }
  }
  StarNormResult out;
  out.value = best;
  if (envelope && envelope->varsigma > 0.5) {
    // per scale: sum_k |F(B xi)| <= 2^j amp (4^{-j}|xi|)^s, summed over j > j_max
    const double s = envelope->varsigma;
    const double r = std::sqrt(2.0) * extent;
    const double ratio = std::pow(2.0, 1.0 - 2.0 * s);
    out.tail_bound = envelope->amplitude * std::pow(r, s) *
                     std::pow(ratio, j_max + 1) / (1.0 - ratio);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sectors
// ---------------------------------------------------------------------------

/// Circular sector V(s,t) (first quadrant, composed with one of the four axis
/// symmetries) or dyadic box W(r,t).
struct Sector {
  enum class Kind { CircularSector, DyadicBox };
  Kind kind = Kind::CircularSector;
  int s = 0;        // radial octave (V) or xi1 exponent (W)
  int t = 0;        // angular index (V, t >= 0) or xi2 exponent (W)
  int symmetry = 0; // 0:(+,+) 1:(-,+) 2:(+,-) 3:(-,-), applied to the V template

  bool contains(double x1, double x2) const {
    if (kind == Kind::DyadicBox) {
      const double a1 = std::abs(x1), a2 = std::abs(x2);
      return std::pow(4.0, s - 1) <= a1 && a1 <= std::pow(4.0, s) &&
             std::pow(2.0, t - 1) <= a2 && a2 <= std::pow(2.0, t);
    }
    if (symmetry & 1) x1 = -x1;
    if (symmetry & 2) x2 = -x2;
    if (x1 < 0.0 || x2 < 0.0) return false;  // first-quadrant template
    const double r = std::hypot(x1, x2);
    if (r < std::pow(2.0, s) || r > std::pow(2.0, s + 1)) return false;
    if (r == 0.0) return false;
    const double c = x1 / r;
    return std::pow(2.0, -(t + 1)) <= c && c <= std::pow(2.0, -t);
  }
};

/// Max over sampled points of #{ j in [1, j_max] : point in R_{theta_j} D_j W(r,t) },
/// with per-scale rotations theta_j in [-2pi 2^{-j}, 2pi 2^{-j}]. Points are
/// sampled from the rotated-dilated boxes themselves (samples_per_axis^2 per
/// box and sign component), since the boxes span exponentially many octaves.
int rotated_box_overlap_count(int r, int t, int j_max,
                              const std::vector<double>& angles,
                              int samples_per_axis);

}  // namespace parapack
