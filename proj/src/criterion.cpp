#include "parapack/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace parapack {

namespace {

// Effective support of a Gaussian-sum window: outside these ranges every term
// is below 1e-18 of the amplitude scale.
struct WindowReach {
  double u_lo = 0.0, u_hi = 0.0;  // xi1 range
  double v_max = 0.0;             // |xi2| bound
};

WindowReach window_reach(const WindowSpec& w) {
  WindowReach r;
  r.u_lo = std::numeric_limits<double>::infinity();
  r.u_hi = -std::numeric_limits<double>::infinity();
  const double amp = std::max(1e-300, static_cast<double>(w.amplitude_sum()));
  for (const auto& g : w.terms) {
    const double cut = std::log(std::max(std::abs(g.amplitude), 1e-30) / (1e-18 * amp));
    if (cut <= 0) continue;
    const double ru = std::sqrt(cut / g.width1);
    const double rv = std::sqrt(cut / g.width2);
    r.u_lo = std::min(r.u_lo, g.center - ru);
    r.u_hi = std::max(r.u_hi, g.center + ru);
    r.v_max = std::max(r.v_max, rv);
  }
  if (!(r.u_lo < r.u_hi)) {
    r.u_lo = -1;
    r.u_hi = 1;
    r.v_max = 1;
  }
  return r;
}

inline void eval_window_abs(const WindowSpec& w, const Eigen::ArrayXd& u,
                            const Eigen::ArrayXd& v, Eigen::ArrayXd& out) {
  out.setZero(u.size());
  for (const auto& g : w.terms) {
    out += g.amplitude *
           (-(g.width1 * (u - g.center).square() + g.width2 * v.square())).exp();
  }
  out = out.abs();
}

// One accumulation kernel serves both the covering symbol (zeta = 0) and the
// correlation sup, so theta_sup(0) reproduces the symbol max bit for bit.
void correlation_accumulate(const WindowSpec& w, const CoarseWindowSpec& w0,
                            const FreqGrid& grid, int j_max,
                            const Eigen::Vector2d& zeta, Eigen::MatrixXd* values,
                            double* out_max) {
  const int n = grid.n;
  const WindowReach reach = window_reach(w);

  struct Band {
    double c, s;
    double scale1, scale2;  // 4^{-j}, 2^{-j}
  };
  std::vector<Band> bands;
  for (int j = 1; j <= j_max; ++j) {
    const double s1 = std::pow(4.0, -j), s2 = std::pow(2.0, -j);
    for (int k = 0; k < (1 << j); ++k) {
      const double th = 2.0 * M_PI * k / static_cast<double>(1 << j);
      bands.push_back({std::cos(th), std::sin(th), s1, s2});
    }
  }

  Eigen::ArrayXd x1(n);
  for (int i = 0; i < n; ++i) x1(i) = grid.coord(i);

  Eigen::ArrayXd u(n), v(n), w1(n), w2(n), acc(n), u2(n), v2(n);
  double gmax = 0.0;
  if (values) values->resize(n, n);

  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = grid.coord(i2);
    // coarse product
    acc = (-(x1.square() + x2 * x2) / w0.sigma).exp() *
          (-((x1 - zeta(0)).square() + (x2 - zeta(1)) * (x2 - zeta(1))) / w0.sigma)
              .exp();
    for (const Band& b : bands) {
      // B xi over the row is affine in x1; prune bands whose support misses it.
      const double ua = b.scale1 * b.c, ub = -b.scale1 * b.s * x2;
      const double va = b.scale2 * b.s, vb = b.scale2 * b.c * x2;
      const double uext = std::abs(ua) * grid.extent;
      const double vext = std::abs(va) * grid.extent;
      const double zu = zeta(0), zv = zeta(1);
      const double u_need_lo = std::min(reach.u_lo, reach.u_lo + zu) - 1e-12;
      const double u_need_hi = std::max(reach.u_hi, reach.u_hi + zu) + 1e-12;
      const double v_need = reach.v_max + std::abs(zv) + 1e-12;
      if (ub + uext < u_need_lo || ub - uext > u_need_hi) continue;
      if (std::abs(vb) - vext > v_need) continue;
      u = ua * x1 + ub;
      v = va * x1 + vb;
      eval_window_abs(w, u, v, w1);
      u2 = u - zu;
      v2 = v - zv;
      eval_window_abs(w, u2, v2, w2);
      acc += w1 * w2;
    }
    if (values) values->col(i2) = acc.matrix();
    const double cmax = acc.maxCoeff();
    if (cmax > gmax) gmax = cmax;
  }
  if (out_max) *out_max = gmax;
}

double symbol_scale_increment(const WindowSpec& w, const CoarseWindowSpec& w0,
                              const FreqGrid& grid, int j) {
  // sup over the grid of the scale-j contribution to the covering symbol
  const int n = grid.n;
  const WindowReach reach = window_reach(w);
  Eigen::ArrayXd x1(n);
  for (int i = 0; i < n; ++i) x1(i) = grid.coord(i);
  Eigen::ArrayXd u(n), v(n), w1(n);
  const double s1 = std::pow(4.0, -j), s2 = std::pow(2.0, -j);
  double best = 0.0;
  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = grid.coord(i2);
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n);
    for (int k = 0; k < (1 << j); ++k) {
      const double th = 2.0 * M_PI * k / static_cast<double>(1 << j);
      const double c = std::cos(th), s = std::sin(th);
      const double ua = s1 * c, ub = -s1 * s * x2;
      const double va = s2 * s, vb = s2 * c * x2;
      if (ub + std::abs(ua) * grid.extent < reach.u_lo ||
          ub - std::abs(ua) * grid.extent > reach.u_hi)
        continue;
      if (std::abs(vb) - std::abs(va) * grid.extent > reach.v_max) continue;
      u = ua * x1 + ub;
      v = va * x1 + vb;
      eval_window_abs(w, u, v, w1);
      acc += w1.square();
    }
    best = std::max(best, acc.maxCoeff());
  }
  (void)w0;
  return best;
}

}  // namespace

SymbolField covering_symbol(const WindowSpec& w, const CoarseWindowSpec& w0,
                            const FreqGrid& grid, int j_max, bool with_tail) {
  if (j_max < 1) throw std::invalid_argument("covering_symbol: j_max >= 1");
  SymbolField f;
  f.grid = grid;
  f.j_max = j_max;
  correlation_accumulate(w, w0, grid, j_max, Eigen::Vector2d::Zero(), &f.values,
                         &f.max_value);
  f.min_value = f.values.minCoeff();

  // resolution check against the narrowest scale-1 feature and the coarse bump
  double w1max = 0, w2max = 0;
  for (const auto& g : w.terms) {
    w1max = std::max(w1max, g.width1);
    w2max = std::max(w2max, g.width2);
  }
  const double feat = std::min({4.0 / std::sqrt(2.0 * w1max),
                                2.0 / std::sqrt(2.0 * w2max),
                                std::sqrt(w0.sigma / 2.0)});
  f.under_resolved = grid.spacing() > feat;

  if (with_tail) {
    const double d1 = symbol_scale_increment(w, w0, grid, j_max + 1);
    const double d2 = symbol_scale_increment(w, w0, grid, j_max + 2);
    double ratio = d1 > 0 ? std::min(0.9, d2 / d1) : 0.0;
    f.tail_bound = d1 > 0 ? d1 / (1.0 - ratio) : 0.0;
  }
  return f;
}

double theta_sup(const WindowSpec& w, const CoarseWindowSpec& w0,
                 const Eigen::Vector2d& zeta, const FreqGrid& grid, int j_max) {
  double m = 0.0;
  correlation_accumulate(w, w0, grid, j_max, zeta, nullptr, &m);
  return m;
}

EnvelopeFit fit_correlation_envelope(const WindowSpec& w, const CoarseWindowSpec& w0,
                                     const FreqGrid& grid, int j_max, double r_min,
                                     double r_max, int n_radii, int n_dirs) {
  if (!(r_min > 0) || !(r_max > r_min)) {
    throw std::invalid_argument("fit_correlation_envelope: bad radius range");
  }
  std::vector<double> xs, ys;
  for (int d = 0; d < n_dirs; ++d) {
    const double phi = 2.0 * M_PI * d / n_dirs;
    const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));
    for (int i = 0; i < n_radii; ++i) {
      const double r = r_min * std::pow(r_max / r_min, i / double(n_radii - 1));
      const double th = theta_sup(w, w0, r * dir, grid, j_max);
      if (th > 1e-290) {
        xs.push_back(r * r);
        ys.push_back(std::log(th));
      }
    }
  }
  if (xs.size() < 4) throw std::runtime_error("correlation envelope fit failed");
  const int m = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double inter = (sy - slope * sx) / m;
  EnvelopeFit fit;
  fit.tau = -slope;
  if (!(fit.tau > 0)) throw std::runtime_error("correlation envelope fit failed");
  double max_resid = 0.0;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / m;
  for (int i = 0; i < m; ++i) {
    const double pred = inter + slope * xs[i];
    max_resid = std::max(max_resid, ys[i] - pred);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.c = std::exp(inter + max_resid);  // inflate so the envelope dominates
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

namespace {

// Tail of sum_{|gamma| > R} c e^{-tau |gamma|^2} over a lattice with cell area
// `cell` and covering radius L: compare against the integral over the region
// each Voronoi cell occupies.
double lattice_tail_bound(double c, double tau, double cell, double big_l, double r) {
  const double s0 = r - 2.0 * big_l;
  if (s0 <= 0) return std::numeric_limits<double>::infinity();
  const double ring = std::exp(-tau * s0 * s0) / (2.0 * tau) +
                      big_l * 0.5 * std::sqrt(M_PI / tau) * std::erfc(std::sqrt(tau) * s0);
  return c / cell * 2.0 * M_PI * ring;
}

}  // namespace

DefectResult frame_defect(const WindowSpec& w, const CoarseWindowSpec& w0,
                          const Lattice& lat, const FreqGrid& grid, int j_max,
                          double gamma_radius, const EnvelopeFit& envelope,
                          bool refined) {
  if (!(gamma_radius > 0)) throw std::invalid_argument("frame_defect: radius > 0");
  const Lattice dual = dual_lattice(lat);
  const auto points = lattice_enumerate(dual, gamma_radius);

  double partial = 0.0;
  int used = 0;
  for (const auto& m : points) {
    // each +-pair contributes twice the same value; process one representative
    if (m(0) < 0 || (m(0) == 0 && m(1) < 0)) continue;
    const Eigen::Vector2d g = dual.point(m);
    const double tp = theta_sup(w, w0, g, grid, j_max);
    const double tm = theta_sup(w, w0, -g, grid, j_max);
    const double term = refined ? std::sqrt(tp * tm) : std::max(tp, tm);
    partial += 2.0 * term;
    used += 2;
  }

  const double cell = std::abs(dual.generator().determinant());
  const double big_l = dual.fundamental_radius();
  const double tail =
      lattice_tail_bound(envelope.c, envelope.tau, cell, big_l, gamma_radius);
  const double budget = 1e-6 * (partial + 1e-30);
  if (!(tail < budget)) {
    double r = std::max(gamma_radius, 4.0 * big_l);
    while (!(lattice_tail_bound(envelope.c, envelope.tau, cell, big_l, r) < budget) &&
           r < 1e9) {
      r *= 1.25;
    }
    std::ostringstream msg;
    msg << "frame_defect: tail bound " << tail << " exceeds budget " << budget
        << " at radius " << gamma_radius << "; radius >= " << r << " suffices";
    throw std::runtime_error(msg.str());
  }

  DefectResult out;
  out.value = partial;
  out.tail_bound = tail;
  out.points_used = used;
  return out;
}

FrameCertificate certify_frame(const WindowSpec& w, const CoarseWindowSpec& w0,
                               const Lattice& lat, const FreqGrid& grid, int j_max,
                               double gamma_radius, bool refined) {
  FrameCertificate cert;
  cert.grid = grid;
  cert.j_max = j_max;

  SymbolField sym = covering_symbol(w, w0, grid, j_max, true);
  cert.cover_min = sym.min_value;
  cert.cover_max = sym.max_value;
  cert.symbol_tail = sym.tail_bound;

  const WindowReach reach = window_reach(w);
  const double diam = 2.0 * std::max({std::abs(reach.u_lo), std::abs(reach.u_hi),
                                      reach.v_max, 3.0 * std::sqrt(w0.sigma / 2.0)});
  cert.envelope =
      fit_correlation_envelope(w, w0, grid, j_max, 0.4 * diam, 1.3 * diam);

  cert.gamma_radius =
      gamma_radius > 0 ? gamma_radius : 12.0 / std::sqrt(cert.envelope.tau);

  DefectResult defect = frame_defect(w, w0, lat, grid, j_max, cert.gamma_radius,
                                     cert.envelope, refined);
  cert.defect = defect.value;
  cert.defect_tail = defect.tail_bound;

  const double vol = lat.volume();
  cert.lower = (cert.cover_min - cert.defect) / vol;
  cert.upper = (cert.cover_max + cert.defect) / vol;
  cert.valid = cert.defect < cert.cover_min;
  return cert;
}

void save_certificate(const FrameCertificate& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "A = %.17g\nB = %.17g\nDelta = %.17g\nlower = %.17g\n"
                "upper = %.17g\nvalid = %d\nj_max = %d\ngamma_radius = %.17g\n"
                "grid_n = %d\ngrid_extent = %.17g\ntau_fit = %.17g\nC_fit = %.17g\n",
                c.cover_min, c.cover_max, c.defect, c.lower, c.upper,
                c.valid ? 1 : 0, c.j_max, c.gamma_radius, c.grid.n, c.grid.extent,
                c.envelope.tau, c.envelope.c);
  out << buf;
}

FrameCertificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    kv[key] = std::strtod(line.c_str() + eq + 1, nullptr);
  }
  FrameCertificate c;
  c.cover_min = kv["A"];
  c.cover_max = kv["B"];
  c.defect = kv["Delta"];
  c.lower = kv["lower"];
  c.upper = kv["upper"];
  c.valid = kv["valid"] != 0;
  c.j_max = static_cast<int>(kv["j_max"]);
  c.gamma_radius = kv["gamma_radius"];
  c.grid.n = static_cast<int>(kv["grid_n"]);
  c.grid.extent = kv["grid_extent"];
  c.envelope.tau = kv["tau_fit"];
  c.envelope.c = kv["C_fit"];
  return c;
}

DecayLawFit fit_defect_decay(const std::vector<std::array<double, 3>>& sweep) {
  std::vector<double> xs, ys;
  for (const auto& row : sweep) {
    const double a = row[0], b = row[1], delta = row[2];
    if (std::abs(a - b) > 1e-9 * std::max(a, b)) continue;
    if (!(delta > 0)) continue;
    xs.push_back(1.0 / (a * a));
    ys.push_back(std::log(delta));
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_defect_decay: need >= 3 usable sweep points");
  }
  const int m = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double inter = (sy - slope * sx) / m;
  DecayLawFit fit;
  fit.tau = -slope;
  fit.prefactor = std::exp(inter);
  fit.points_used = m;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / m;
  for (int i = 0; i < m; ++i) {
    const double pred = inter + slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace parapack
