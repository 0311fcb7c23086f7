#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace parapack {

using Complex = std::complex<double>;

/// Parse/IO failure carrying the byte offset of the offending data.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Complex samples on an n x n uniform grid over [-extent, extent)^2.
/// samples(i1, i2) sits at coordinate (-extent + i1*h, -extent + i2*h) with
/// h = 2*extent/n; the first index runs along the x1 (or xi1) axis. n is a
/// power of two. The Fourier convention is f^(xi) = \int f(x) e^{-2pi i xi.x}.
struct Field {
  enum class Domain : std::uint8_t { Spatial = 0, Frequency = 1 };

  Eigen::MatrixXcd samples;
  Domain domain = Domain::Spatial;
  double extent = 1.0;

  int n() const { return static_cast<int>(samples.rows()); }
  double spacing() const { return 2.0 * extent / n(); }
  double coord(int i) const { return -extent + i * spacing(); }
};

Field make_field(int n, double extent, Field::Domain domain);

/// L2 quadrature norm: spacing * Frobenius norm of the sample matrix.
double l2_norm(const Field& f);

/// <a, b> = spacing^2 * sum a conj(b); both fields must share the grid.
Complex inner(const Field& a, const Field& b);

/// Unitary centered DFT pair. to_frequency(f).extent == n/(4*f.extent).
Field to_frequency(const Field& spatial);
Field to_spatial(const Field& frequency);

/// Frequency field with iid complex normal samples where |xi| <= band.
Field random_bandlimited(int n, double extent, double band, std::uint64_t seed);

/// Binary "WPF1" format: magic, u32 n, u8 domain, f64 extent, then n*n
/// complex samples as interleaved f64 (re, im), row-major with row = second
/// coordinate. Little-endian IEEE doubles.
void save_field(const Field& f, const std::string& path);
Field load_field(const std::string& path);

}  // namespace parapack
