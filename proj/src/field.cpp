#include "parapack/field.hpp"

#include <unsupported/Eigen/FFT>

#include <cstdio>
#include <memory>
#include <vector>

#include "parapack/rng.hpp"

namespace parapack {

namespace {

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

void check_grid(int n) {
  if (!power_of_two(n)) {
    throw std::invalid_argument("field grid size must be a power of two >= 2");
  }
}

// Centered transform: out_k = scale * sum_j in_j e^{sign 2pi i (k-n/2)(j-n/2)/n}
// per axis, realized as checkerboard phases around a plain FFT. For even n the
// residual global phase is (-1)^{n/2} per axis and cancels over two axes.
Eigen::MatrixXcd centered_fft2(const Eigen::MatrixXcd& in, bool forward) {
  const int n = static_cast<int>(in.rows());
  Eigen::MatrixXcd work = in;
  for (int i2 = 0; i2 < n; ++i2)
    for (int i1 = 0; i1 < n; ++i1)
      if ((i1 + i2) & 1) work(i1, i2) = -work(i1, i2);

  Eigen::FFT<double> fft;
  std::vector<Complex> line(n), tline(n);
  // columns (first index contiguous)
  for (int i2 = 0; i2 < n; ++i2) {
    Eigen::VectorXcd col = work.col(i2);
    Eigen::VectorXcd out(n);
    if (forward)
      fft.fwd(out, col);
    else {
      fft.inv(out, col);
      out *= static_cast<double>(n);  // undo Eigen's 1/n
    }
    work.col(i2) = out;
  }
  // rows
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) line[i2] = work(i1, i2);
    if (forward)
      fft.fwd(tline, line);
    else {
      fft.inv(tline, line);
      for (auto& v : tline) v *= static_cast<double>(n);
    }
    for (int i2 = 0; i2 < n; ++i2) work(i1, i2) = tline[i2];
  }

  for (int i2 = 0; i2 < n; ++i2)
    for (int i1 = 0; i1 < n; ++i1)
      if ((i1 + i2) & 1) work(i1, i2) = -work(i1, i2);
  return work;
}

}  // namespace

Field make_field(int n, double extent, Field::Domain domain) {
  check_grid(n);
  if (extent <= 0) throw std::invalid_argument("field extent must be positive");
  Field f;
  f.samples = Eigen::MatrixXcd::Zero(n, n);
  f.domain = domain;
  f.extent = extent;
  return f;
}

double l2_norm(const Field& f) { return f.spacing() * f.samples.norm(); }

Complex inner(const Field& a, const Field& b) {
  if (a.n() != b.n() || a.extent != b.extent || a.domain != b.domain) {
    throw std::invalid_argument("inner: mismatched grids");
  }
  const double h2 = a.spacing() * a.spacing();
  return h2 * (a.samples.array() * b.samples.array().conjugate()).sum();
}

Field to_frequency(const Field& spatial) {
  if (spatial.domain != Field::Domain::Spatial) {
    throw std::invalid_argument("to_frequency expects a spatial field");
  }
  const int n = spatial.n();
  check_grid(n);
  const double h = spatial.spacing();
  Field out;
  out.domain = Field::Domain::Frequency;
  out.extent = n / (4.0 * spatial.extent);
  out.samples = centered_fft2(spatial.samples, true) * (h * h);
  return out;
}

Field to_spatial(const Field& frequency) {
  if (frequency.domain != Field::Domain::Frequency) {
    throw std::invalid_argument("to_spatial expects a frequency field");
  }
  const int n = frequency.n();
  check_grid(n);
  const double dxi = frequency.spacing();
  Field out;
  out.domain = Field::Domain::Spatial;
  out.extent = n / (4.0 * frequency.extent);
  out.samples = centered_fft2(frequency.samples, false) * (dxi * dxi);
  return out;
}

Field random_bandlimited(int n, double extent, double band, std::uint64_t seed) {
  Field f = make_field(n, extent, Field::Domain::Frequency);
  Xoshiro256 rng(seed);
  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = f.coord(i2);
    for (int i1 = 0; i1 < n; ++i1) {
      const double x1 = f.coord(i1);
      if (x1 * x1 + x2 * x2 <= band * band) {
        f.samples(i1, i2) = Complex(rng.normal(), rng.normal());
      }
    }
  }
  return f;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void save_field(const Field& f, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open for writing: " + path);
  const char magic[4] = {'W', 'P', 'F', '1'};
  std::fwrite(magic, 1, 4, fp.get());
  const std::uint32_t n = static_cast<std::uint32_t>(f.n());
  std::fwrite(&n, 4, 1, fp.get());
  const std::uint8_t dom = static_cast<std::uint8_t>(f.domain);
  std::fwrite(&dom, 1, 1, fp.get());
  std::fwrite(&f.extent, 8, 1, fp.get());
  // column-major storage is i1-fastest, which is exactly the file order
  // (row = second coordinate).
  std::fwrite(f.samples.data(), sizeof(Complex), f.samples.size(), fp.get());
}

Field load_field(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, fp.get()) != 4 || magic[0] != 'W' ||
      magic[1] != 'P' || magic[2] != 'F' || magic[3] != '1') {
    throw FormatError("bad field magic", 0);
  }
  std::uint32_t n = 0;
  if (std::fread(&n, 4, 1, fp.get()) != 1) throw FormatError("truncated header", 4);
  if (!power_of_two(static_cast<int>(n)) || n > (1u << 16)) {
    throw FormatError("invalid grid size", 4);
  }
  std::uint8_t dom = 0;
  if (std::fread(&dom, 1, 1, fp.get()) != 1) throw FormatError("truncated header", 8);
  if (dom > 1) throw FormatError("invalid domain flag", 8);
  double extent = 0;
  if (std::fread(&extent, 8, 1, fp.get()) != 1) throw FormatError("truncated header", 9);
  if (!(extent > 0) || !std::isfinite(extent)) throw FormatError("invalid extent", 9);
  Field f = make_field(static_cast<int>(n), extent, static_cast<Field::Domain>(dom));
  const std::size_t count = static_cast<std::size_t>(n) * n;
  const std::size_t got = std::fread(f.samples.data(), sizeof(Complex), count, fp.get());
  if (got != count) {
    throw FormatError("truncated samples", 17 + 16 * static_cast<std::uint64_t>(got));
  }
  return f;
}

}  // namespace parapack
