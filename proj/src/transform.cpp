#include "parapack/transform.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

namespace parapack {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Reach {
  double u_lo = 0, u_hi = 0, v_max = 0;
};

Reach fine_reach(const WindowSpec& w) {
  Reach r;
  r.u_lo = std::numeric_limits<double>::infinity();
  r.u_hi = -std::numeric_limits<double>::infinity();
  const double amp = std::max(1e-300, w.amplitude_sum());
  for (const auto& g : w.terms) {
    const double cut = std::log(std::max(std::abs(g.amplitude), 1e-30) / (1e-18 * amp));
    if (cut <= 0) continue;
    r.u_lo = std::min(r.u_lo, g.center - std::sqrt(cut / g.width1));
    r.u_hi = std::max(r.u_hi, g.center + std::sqrt(cut / g.width1));
    r.v_max = std::max(r.v_max, std::sqrt(cut / g.width2));
  }
  if (!(r.u_lo < r.u_hi)) r = {-1, 1, 1};
  return r;
}

// Window evaluators for the fine bands; psi differs from the base window by
// the smoothstep cutoff only, so both share the base support.
struct BaseEval {
  const WindowSpec* w;
  double operator()(double u, double v) const { return (*w)(u, v); }
};

struct PsiEval {
  const WindowSpec* w;
  double eps;
  double operator()(double u, double v) const {
    return eval_psi_hat(*w, eps, u, v);
  }
};

struct Band {
  int j = 0, k = 0;               // j == 0: coarse translates
  Eigen::Matrix2d bmat;           // B_{j,k}
  Eigen::Matrix2d center_map;     // A_{j,k}^{-1} P (or P for the coarse band)
  double norm_factor = 1.0;       // 8^{-j/2}
  std::vector<Eigen::Vector2i> ms;
};

// Packet centers restricted to the spatial fundamental domain [-X, X)^2:
// periodized packets repeat beyond it, so a margin would double-count.
void enumerate_centers(Band& band, double x_half) {
  const Eigen::Matrix2d inv = band.center_map.inverse();
  double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
  for (int sa = -1; sa <= 1; sa += 2) {
    for (int sb = -1; sb <= 1; sb += 2) {
      const Eigen::Vector2d c = inv * Eigen::Vector2d(sa * x_half, sb * x_half);
      lo1 = std::min(lo1, c(0));
      hi1 = std::max(hi1, c(0));
      lo2 = std::min(lo2, c(1));
      hi2 = std::max(hi2, c(1));
    }
  }
  const int a1 = static_cast<int>(std::floor(lo1)) - 1;
  const int b1 = static_cast<int>(std::ceil(hi1)) + 1;
  const int a2 = static_cast<int>(std::floor(lo2)) - 1;
  const int b2 = static_cast<int>(std::ceil(hi2)) + 1;
  for (int m1 = a1; m1 <= b1; ++m1) {
    for (int m2 = a2; m2 <= b2; ++m2) {
      const Eigen::Vector2d c = band.center_map * Eigen::Vector2d(m1, m2);
      if (c(0) >= -x_half && c(0) < x_half && c(1) >= -x_half && c(1) < x_half) {
        band.ms.push_back({m1, m2});
      }
    }
  }
  std::sort(band.ms.begin(), band.ms.end(),
            [](const Eigen::Vector2i& a, const Eigen::Vector2i& b) {
              return a(0) != b(0) ? a(0) < b(0) : a(1) < b(1);
            });
}

std::vector<Band> plan_bands(const Lattice& lat, int j_max, double x_half) {
  std::vector<Band> bands;
  {
    Band coarse;
    coarse.j = 0;
    coarse.k = 0;
    coarse.bmat = Eigen::Matrix2d::Identity();
    coarse.center_map = lat.generator();
    coarse.norm_factor = 1.0;
    enumerate_centers(coarse, x_half);
    bands.push_back(std::move(coarse));
  }
  for (int j = 1; j <= j_max; ++j) {
    for (int k = 0; k < (1 << j); ++k) {
      Band b;
      b.j = j;
      b.k = k;
      b.bmat = packet_dual_matrix<double>({j, k});
      b.center_map = packet_matrix<double>({j, k}).inverse() * lat.generator();
      b.norm_factor = std::pow(8.0, -0.5 * j);
      enumerate_centers(b, x_half);
      bands.push_back(std::move(b));
    }
  }
  return bands;
}

// Rational alignment of the center map against the spatial pitch: returns the
// common denominator q <= q_max with center_map = (pitch/q) * K, K integral,
// or 0 when there is none.
int rational_alignment(const Eigen::Matrix2d& center_map, double pitch,
                       Eigen::Matrix2i* k_out, int q_max = 16) {
  for (int q = 1; q <= q_max; ++q) {
    Eigen::Matrix2i k;
    bool ok = true;
    for (int r = 0; r < 2 && ok; ++r) {
      for (int c = 0; c < 2 && ok; ++c) {
        const double e = center_map(r, c) / pitch * q;
        const double rd = std::round(e);
        if (std::abs(e - rd) > 1e-9 * std::max(1.0, std::abs(e))) ok = false;
        if (std::abs(rd) > 1e9) ok = false;
        k(r, c) = static_cast<int>(rd);
      }
    }
    if (ok) {
      *k_out = k;
      return q;
    }
  }
  return 0;
}

// Band sample cache: W(xi_g) on the grid for the band's pullback, plus the
// list of points where it is non-negligible.
struct BandSamples {
  Eigen::MatrixXd w;                 // window values (real)
  std::vector<std::pair<int, int>> active;
};

template <class Eval>
BandSamples sample_band(const Band& band, const Eval& eval,
                        const CoarseWindowSpec& w0, const Reach& reach,
                        const FreqGrid& grid) {
  const int n = grid.n;
  BandSamples out;
  out.w.resize(n, n);
  const double thresh = 1e-18;
  if (band.j == 0) {
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = grid.coord(i2);
      for (int i1 = 0; i1 < n; ++i1) {
        const double x1 = grid.coord(i1);
        const double val = w0(x1, x2);
        out.w(i1, i2) = val;
        if (std::abs(val) > thresh) out.active.push_back({i1, i2});
      }
    }
    return out;
  }
  const Eigen::Matrix2d& b = band.bmat;
  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = grid.coord(i2);
    for (int i1 = 0; i1 < n; ++i1) {
      const double x1 = grid.coord(i1);
      const double u = b(0, 0) * x1 + b(0, 1) * x2;
      const double v = b(1, 0) * x1 + b(1, 1) * x2;
      double val = 0.0;
      if (u >= reach.u_lo && u <= reach.u_hi && std::abs(v) <= reach.v_max) {
        val = eval(u, v);
      }
      out.w(i1, i2) = val;
      if (std::abs(val) > thresh) out.active.push_back({i1, i2});
    }
  }
  return out;
}

class Fft2 {
 public:
  Eigen::MatrixXcd forward(const Eigen::MatrixXcd& in) {
    const int rows = static_cast<int>(in.rows());
    const int cols = static_cast<int>(in.cols());
    Eigen::MatrixXcd work(rows, cols);
    Eigen::VectorXcd tmp(rows);
    for (int c = 0; c < cols; ++c) {
      Eigen::VectorXcd col = in.col(c);
      fft_.fwd(tmp, col);
      work.col(c) = tmp;
    }
    std::vector<Complex> line(cols), tline(cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) line[c] = work(r, c);
      fft_.fwd(tline, line);
      for (int c = 0; c < cols; ++c) work(r, c) = tline[c];
    }
    return work;
  }

 private:
  Eigen::FFT<double> fft_;
};

template <class Eval>
CoefficientSet analyze_impl(const Field& f, const Eval& eval,
                            const CoarseWindowSpec& w0, const Reach& reach,
                            const Lattice& lat, int j_max, AnalysisPath path) {
  if (f.domain != Field::Domain::Frequency) {
    throw std::invalid_argument("analyze expects a frequency field");
  }
  const int n = f.n();
  const FreqGrid grid{f.extent, n};
  const double x_half = n / (4.0 * f.extent);
  const double pitch = 2.0 * x_half / n;
  const double dxi2 = grid.spacing() * grid.spacing();

  auto bands = plan_bands(lat, j_max, x_half);
  std::size_t total = 0;
  for (const auto& b : bands) total += b.ms.size();
  if (total == 0) throw std::runtime_error("analyze: empty index set");

  CoefficientSet out;
  out.lattice_generator = lat.generator();
  out.j_max = j_max;
  out.grid_n = n;
  out.grid_extent = f.extent;
  out.entries.reserve(total);

  Fft2 fft;
  for (const auto& band : bands) {
    if (band.ms.empty()) continue;
    BandSamples samples = sample_band(band, eval, w0, reach, grid);

    Eigen::Matrix2i kmat;
    const int q = path == AnalysisPath::Fast
                      ? rational_alignment(band.center_map, pitch, &kmat)
                      : 0;
    const long big = static_cast<long>(q) * n;
    if (q > 0 && big <= 4096) {
      // c(m) = dxi^2 nf e^{-pi i n (p1+p2)/G} FFT[H]((-p) mod G), p = K m
      const int g = static_cast<int>(big);
      Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(g, g);
      for (const auto& [i1, i2] : samples.active) {
        h(i1, i2) = f.samples(i1, i2) * samples.w(i1, i2);
      }
      const Eigen::MatrixXcd hat = fft.forward(h);
      for (const auto& m : band.ms) {
        const Eigen::Vector2i p = kmat * m;
        const int q1 = ((-p(0)) % g + g) % g;
        const int q2 = ((-p(1)) % g + g) % g;
        const double ph = -M_PI * static_cast<double>(n) *
                          (static_cast<double>(p(0)) + p(1)) / g;
        const Complex phase(std::cos(ph), std::sin(ph));
        out.entries.push_back({PacketIndex{band.j, band.k, m},
                               dxi2 * band.norm_factor * phase * hat(q1, q2)});
      }
      continue;
    }

    // direct quadrature with separable phase vectors
    std::vector<Complex> hs(samples.active.size());
    for (std::size_t i = 0; i < samples.active.size(); ++i) {
      const auto& [i1, i2] = samples.active[i];
      hs[i] = f.samples(i1, i2) * samples.w(i1, i2);
    }
    Eigen::VectorXcd row_phase(n), col_phase(n);
    for (const auto& m : band.ms) {
      const Eigen::Vector2d x = band.center_map * m.cast<double>();
      for (int i = 0; i < n; ++i) {
        const double a1 = kTwoPi * grid.coord(i) * x(0);
        const double a2 = kTwoPi * grid.coord(i) * x(1);
        row_phase(i) = Complex(std::cos(a1), std::sin(a1));
        col_phase(i) = Complex(std::cos(a2), std::sin(a2));
      }
      Complex acc(0, 0);
      for (std::size_t i = 0; i < samples.active.size(); ++i) {
        const auto& [i1, i2] = samples.active[i];
        acc += hs[i] * row_phase(i1) * col_phase(i2);
      }
      out.entries.push_back(
          {PacketIndex{band.j, band.k, m}, dxi2 * band.norm_factor * acc});
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace

Complex packet_frequency(const PacketIndex& idx, const WindowSpec& w,
                         const CoarseWindowSpec& w0, const Eigen::Vector2d& xi,
                         const Lattice& lat) {
  if (idx.j == 0) {
    const Eigen::Vector2d lam = lat.point(idx.m);
    const double a = -kTwoPi * xi.dot(lam);
    return Complex(std::cos(a), std::sin(a)) * w0(xi(0), xi(1));
  }
  if (!valid_index({idx.j, idx.k})) throw std::invalid_argument("invalid packet index");
  const Eigen::Matrix2d b = packet_dual_matrix<double>({idx.j, idx.k});
  const Eigen::Matrix2d ainv = packet_matrix<double>({idx.j, idx.k}).inverse();
  const Eigen::Vector2d center = ainv * lat.point(idx.m);
  const Eigen::Vector2d u = b * xi;
  const double a = -kTwoPi * xi.dot(center);
  return std::pow(8.0, -0.5 * idx.j) * Complex(std::cos(a), std::sin(a)) *
         w(u(0), u(1));
}

const Complex* CoefficientSet::find(const PacketIndex& idx) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), idx,
      [](const auto& e, const PacketIndex& key) { return e.first < key; });
  if (it != entries.end() && it->first == idx) return &it->second;
  return nullptr;
}

CoefficientSet analyze(const Field& f, const WindowSpec& w,
                       const CoarseWindowSpec& w0, const Lattice& lat, int j_max,
                       AnalysisPath path) {
  return analyze_impl(f, BaseEval{&w}, w0, fine_reach(w), lat, j_max, path);
}

CoefficientSet analyze_dual(const Field& f, const DualWindow& dual,
                            const Lattice& lat, AnalysisPath path) {
  return analyze_impl(f, PsiEval{&dual.base, dual.epsilon}, dual.coarse,
                      fine_reach(dual.base), lat, dual.j_max, path);
}

Field synthesize(const CoefficientSet& coeffs, const WindowSpec& w,
                 const CoarseWindowSpec& w0, const FreqGrid& grid,
                 AnalysisPath path) {
  const int n = grid.n;
  Field out = make_field(n, grid.extent, Field::Domain::Frequency);
  if (coeffs.entries.empty()) return out;

  const Lattice lat(coeffs.lattice_generator);
  const double x_half = n / (4.0 * grid.extent);
  const double pitch = 2.0 * x_half / n;
  const Reach reach = fine_reach(w);

  Fft2 fft;
  std::size_t pos = 0;
  while (pos < coeffs.entries.size()) {
    const int j = coeffs.entries[pos].first.j;
    const int k = coeffs.entries[pos].first.k;
    std::size_t end = pos;
    while (end < coeffs.entries.size() && coeffs.entries[end].first.j == j &&
           coeffs.entries[end].first.k == k) {
      ++end;
    }
    Band band;
    band.j = j;
    band.k = k;
    if (j == 0) {
      band.bmat = Eigen::Matrix2d::Identity();
      band.center_map = lat.generator();
      band.norm_factor = 1.0;
    } else {
      band.bmat = packet_dual_matrix<double>({j, k});
      band.center_map = packet_matrix<double>({j, k}).inverse() * lat.generator();
      band.norm_factor = std::pow(8.0, -0.5 * j);
    }
    BandSamples samples = sample_band(band, BaseEval{&w}, w0, reach, grid);

    Eigen::Matrix2i kmat;
    const int q = path == AnalysisPath::Fast
                      ? rational_alignment(band.center_map, pitch, &kmat)
                      : 0;
    const long big = static_cast<long>(q) * n;
    if (q > 0 && big <= 4096) {
      const int g = static_cast<int>(big);
      Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(g, g);
      for (std::size_t i = pos; i < end; ++i) {
        const Eigen::Vector2i p = kmat * coeffs.entries[i].first.m;
        const double ph = M_PI * static_cast<double>(n) *
                          (static_cast<double>(p(0)) + p(1)) / g;
        const int q1 = (p(0) % g + g) % g;
        const int q2 = (p(1) % g + g) % g;
        z(q1, q2) += coeffs.entries[i].second * Complex(std::cos(ph), std::sin(ph));
      }
      const Eigen::MatrixXcd zh = fft.forward(z);
      for (const auto& [i1, i2] : samples.active) {
        out.samples(i1, i2) += band.norm_factor * samples.w(i1, i2) * zh(i1, i2);
      }
    } else {
      Eigen::VectorXcd row_phase(n), col_phase(n);
      Eigen::MatrixXcd accum = Eigen::MatrixXcd::Zero(n, n);
      for (std::size_t i = pos; i < end; ++i) {
        const Eigen::Vector2d x =
            band.center_map * coeffs.entries[i].first.m.cast<double>();
        for (int t = 0; t < n; ++t) {
          const double a1 = -kTwoPi * grid.coord(t) * x(0);
          const double a2 = -kTwoPi * grid.coord(t) * x(1);
          row_phase(t) = Complex(std::cos(a1), std::sin(a1));
          col_phase(t) = Complex(std::cos(a2), std::sin(a2));
        }
        const Complex c = coeffs.entries[i].second;
        for (const auto& [i1, i2] : samples.active) {
          accum(i1, i2) += c * row_phase(i1) * col_phase(i2);
        }
      }
      for (const auto& [i1, i2] : samples.active) {
        out.samples(i1, i2) += band.norm_factor * samples.w(i1, i2) * accum(i1, i2);
      }
    }
    pos = end;
  }
  return out;
}

OperatorCheckReport frame_operator_check(const Field& f, const WindowSpec& w,
                                         const CoarseWindowSpec& w0,
                                         const Lattice& lat, int j_max,
                                         double defect, double slack) {
  const FreqGrid grid{f.extent, f.n()};
  CoefficientSet coeffs = analyze(f, w, w0, lat, j_max, AnalysisPath::Fast);
  Field sf = synthesize(coeffs, w, w0, grid, AnalysisPath::Fast);
  SymbolField sym = covering_symbol(w, w0, grid, j_max, false);

  Field diff = make_field(f.n(), f.extent, Field::Domain::Frequency);
  const double vol = lat.volume();
  diff.samples = vol * sf.samples -
                 (sym.values.array() * f.samples.array()).matrix();
  OperatorCheckReport rep;
  rep.residual = l2_norm(diff);
  rep.f_norm = l2_norm(f);
  rep.bound = defect * rep.f_norm;
  rep.within = rep.residual <= rep.bound * (1.0 + slack) + 1e-12 * rep.f_norm;
  return rep;
}

double cutoff_value(const WindowSpec& w, double eps, double xi1, double xi2) {
  const double a = std::abs(w(xi1, xi2));
  const double u = (a - 0.5 * eps) / (0.5 * eps);
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

double eval_psi_hat(const WindowSpec& w, double eps, double xi1, double xi2) {
  const double v = w(xi1, xi2);
  const double u = (std::abs(v) - 0.5 * eps) / (0.5 * eps);
  if (u <= 0) return 0.0;
  if (u >= 1) return v;
  return v * u * u * (3.0 - 2.0 * u);
}

DualWindow build_dual(const WindowSpec& w, const CoarseWindowSpec& w0, double eps,
                      const FreqGrid& grid, int j_max) {
  if (!(eps > 0)) throw std::invalid_argument("build_dual: eps > 0");
  DualWindow dual;
  dual.base = w;
  dual.coarse = w0;
  dual.epsilon = eps;
  dual.j_max = j_max;

  const Reach reach = fine_reach(w);
  const double reach_max =
      std::max({std::abs(reach.u_lo), std::abs(reach.u_hi), reach.v_max});
  const double sn_extent = std::pow(4.0, std::min(j_max, 3)) * reach_max * 1.1;
  dual.star_norm = star_norm_estimate(
                       [&](double u, double v) { return std::abs(w(u, v)); },
                       sn_extent, 256, j_max)
                       .value;

  SymbolField sym = covering_symbol(w, w0, grid, j_max, false);
  dual.a_tilde = sym.min_value - eps * dual.star_norm;
  if (!(dual.a_tilde > 0)) throw std::runtime_error("cutoff too large");

  // m~(xi) = |phi0^|^2 + sum eta(B xi) |phi^(B xi)|^2 on the grid
  const int n = grid.n;
  dual.m_tilde.grid = grid;
  dual.m_tilde.j_max = j_max;
  dual.m_tilde.values.resize(n, n);
  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = grid.coord(i2);
    for (int i1 = 0; i1 < n; ++i1) {
      const double x1 = grid.coord(i1);
      const double c0 = w0(x1, x2);
      double acc = c0 * c0;
      for (int j = 1; j <= j_max; ++j) {
        const double s1 = std::pow(4.0, -j), s2 = std::pow(2.0, -j);
        for (int k = 0; k < (1 << j); ++k) {
          const double th = 2.0 * M_PI * k / static_cast<double>(1 << j);
          const double u = s1 * (std::cos(th) * x1 - std::sin(th) * x2);
          const double v = s2 * (std::sin(th) * x1 + std::cos(th) * x2);
          if (u < reach.u_lo || u > reach.u_hi || std::abs(v) > reach.v_max) continue;
          const double val = w(u, v);
          acc += cutoff_value(w, eps, u, v) * val * val;
        }
      }
      dual.m_tilde.values(i1, i2) = acc;
    }
  }
  dual.m_tilde.min_value = dual.m_tilde.values.minCoeff();
  dual.m_tilde.max_value = dual.m_tilde.values.maxCoeff();
  return dual;
}

std::pair<Field, ReconstructionReport> approx_reconstruct(const Field& f,
                                                          const DualWindow& dual,
                                                          const Lattice& lat,
                                                          double defect,
                                                          AnalysisPath path) {
  if (f.domain != Field::Domain::Frequency) {
    throw std::invalid_argument("approx_reconstruct expects a frequency field");
  }
  if (f.n() != dual.m_tilde.grid.n ||
      std::abs(f.extent - dual.m_tilde.grid.extent) > 1e-12 * f.extent) {
    throw std::invalid_argument("approx_reconstruct: field grid does not match dual");
  }
  if (!(dual.m_tilde.min_value > 0)) {
    throw std::runtime_error("approx_reconstruct: m~ vanishes on the grid");
  }

  Field g = f;
  g.samples.array() /= dual.m_tilde.values.array();
  CoefficientSet coeffs = analyze_dual(g, dual, lat, path);
  const FreqGrid grid{f.extent, f.n()};
  Field rec = synthesize(coeffs, dual.base, dual.coarse, grid, path);
  rec.samples *= lat.volume();

  ReconstructionReport rep;
  rep.defect = defect;
  rep.a_tilde = dual.a_tilde;
  rep.bound = defect / dual.a_tilde;
  const double fn = l2_norm(f);
  if (fn > 0) {
    Field diff = f;
    diff.samples -= rec.samples;
    rep.rel_error = l2_norm(diff) / fn;
  }
  return {std::move(rec), rep};
}

namespace {
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void save_coefficients(const CoefficientSet& c, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open for writing: " + path);
  const char magic[4] = {'W', 'P', 'C', '1'};
  std::fwrite(magic, 1, 4, fp.get());
  const std::uint32_t count = static_cast<std::uint32_t>(c.entries.size());
  std::fwrite(&count, 4, 1, fp.get());
  for (const auto& [idx, val] : c.entries) {
    const std::int32_t rec[4] = {idx.j, idx.k, idx.m(0), idx.m(1)};
    std::fwrite(rec, 4, 4, fp.get());
    const double re = val.real(), im = val.imag();
    std::fwrite(&re, 8, 1, fp.get());
    std::fwrite(&im, 8, 1, fp.get());
  }
}

CoefficientSet load_coefficients(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, fp.get()) != 4 || magic[0] != 'W' ||
      magic[1] != 'P' || magic[2] != 'C' || magic[3] != '1') {
    throw FormatError("bad coefficient magic", 0);
  }
  std::uint32_t count = 0;
  if (std::fread(&count, 4, 1, fp.get()) != 1) throw FormatError("truncated header", 4);
  CoefficientSet c;
  c.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::int32_t rec[4];
    double re, im;
    const std::uint64_t offset = 8 + static_cast<std::uint64_t>(i) * 32;
    if (std::fread(rec, 4, 4, fp.get()) != 4 || std::fread(&re, 8, 1, fp.get()) != 1 ||
        std::fread(&im, 8, 1, fp.get()) != 1) {
      throw FormatError("truncated coefficient record", offset);
    }
    if (rec[0] < 0 || (rec[0] > 0 && (rec[1] < 0 || rec[1] >= (1 << std::min(rec[0], 30))))) {
      throw FormatError("invalid packet index", offset);
    }
    c.entries.push_back({PacketIndex{rec[0], rec[1], {rec[2], rec[3]}}, Complex(re, im)});
  }
  std::sort(c.entries.begin(), c.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  c.j_max = c.entries.empty() ? 0 : c.entries.back().first.j;
  return c;
}

}  // namespace parapack
