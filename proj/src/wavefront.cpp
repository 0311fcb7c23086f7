#include "parapack/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace parapack {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

}  // namespace

PhaseSpacePoint make_phase_point(double x1, double x2, double theta) {
  PhaseSpacePoint p;
  p.x = Eigen::Vector2d(x1, x2);
  p.theta = wrap_angle(theta);
  return p;
}

GridParams grid_params(const PhaseSpacePoint& p, const Lattice& lat, int j) {
  if (j < 1) throw std::invalid_argument("grid_params: j >= 1");
  const double pow2j = static_cast<double>(1 << j);
  const double u = pow2j * (1.0 - p.theta / kTwoPi);
  int k;
  if (u == std::floor(u)) {
    k = static_cast<int>(u) - 1;  // tie: both k and k-1 admissible, take smaller
  } else {
    k = static_cast<int>(std::floor(u));
  }
  k = std::min(std::max(k, 0), (1 << j) - 1);

  GridParams out;
  out.k = k;
  const Eigen::Vector2d y = packet_matrix<double>({j, k}) * p.x;
  out.m = nearest_lattice_point(lat, y);
  out.lambda = lat.point(out.m);
  return out;
}

Complex packet_spatial(const WindowSpec& w, int j, int k,
                       const Eigen::Vector2d& lambda, const Eigen::Vector2d& x) {
  const Eigen::Vector2d y = packet_matrix<double>({j, k}) * x - lambda;
  Complex acc(0, 0);
  for (const auto& g : w.terms) {
    const double gauss = std::exp(-M_PI * M_PI * (y(0) * y(0) / g.width1 +
                                                  y(1) * y(1) / g.width2));
    const double amp = g.amplitude * M_PI / std::sqrt(g.width1 * g.width2) * gauss;
    const double ph = kTwoPi * g.center * y(0);
    acc += amp * Complex(std::cos(ph), std::sin(ph));
  }
  return std::pow(8.0, 0.5 * j) * acc;
}

namespace {

// Spatial support radii of the undilated window (1e-18 falloff per term).
struct SpatialReach {
  double r1 = 1.0, r2 = 1.0;
};

SpatialReach spatial_reach(const WindowSpec& w) {
  SpatialReach r;
  r.r1 = 0;
  r.r2 = 0;
  const double cut = std::log(1e18);
  for (const auto& g : w.terms) {
    r.r1 = std::max(r.r1, std::sqrt(g.width1 * cut) / M_PI);
    r.r2 = std::max(r.r2, std::sqrt(g.width2 * cut) / M_PI);
  }
  return r;
}

// <f, packet>; the packet is evaluated only on the bounding box of its
// support A^{-1}([-r1, r1] x [-r2, r2]) + center.
Complex spatial_coefficient(const Field& f, const WindowSpec& w, int j, int k,
                            const Eigen::Vector2d& lambda) {
  const SpatialReach reach = spatial_reach(w);
  const Eigen::Matrix2d ainv = packet_matrix<double>({j, k}).inverse();
  const Eigen::Vector2d center = ainv * lambda;
  double bx = 0, by = 0;
  for (int s1 = -1; s1 <= 1; s1 += 2) {
    for (int s2 = -1; s2 <= 1; s2 += 2) {
      const Eigen::Vector2d c = ainv * Eigen::Vector2d(s1 * reach.r1, s2 * reach.r2);
      bx = std::max(bx, std::abs(c(0)));
      by = std::max(by, std::abs(c(1)));
    }
  }
  const int n = f.n();
  const double h = f.spacing();
  const int i1_lo = std::max(0, static_cast<int>(std::floor((center(0) - bx + f.extent) / h)));
  const int i1_hi = std::min(n - 1, static_cast<int>(std::ceil((center(0) + bx + f.extent) / h)));
  const int i2_lo = std::max(0, static_cast<int>(std::floor((center(1) - by + f.extent) / h)));
  const int i2_hi = std::min(n - 1, static_cast<int>(std::ceil((center(1) + by + f.extent) / h)));

  Complex acc(0, 0);
  for (int i2 = i2_lo; i2 <= i2_hi; ++i2) {
    const double x2 = f.coord(i2);
    for (int i1 = i1_lo; i1 <= i1_hi; ++i1) {
      const Eigen::Vector2d x(f.coord(i1), x2);
      acc += f.samples(i1, i2) * std::conj(packet_spatial(w, j, k, lambda, x));
    }
  }
  return h * h * acc;
}

double fit_rate(std::vector<ProbeRecord>& records) {
  std::vector<double> js, ys;
  for (const auto& r : records) {
    if (r.abs_coeff > 1e-14) {
      js.push_back(r.j);
      ys.push_back(r.log4_abs);
    }
  }
  if (js.size() < 2) return std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(js.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += js[i];
    sy += ys[i];
    sxx += js[i] * js[i];
    sxy += js[i] * ys[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

int usable_scale(const Field& f, const WindowSpec& w) {
  double u_hi = 0;
  for (const auto& g : w.terms) {
    u_hi = std::max(u_hi, std::abs(g.center) + 3.0 / std::sqrt(2.0 * g.width1));
  }
  const double nyquist = f.domain == Field::Domain::Spatial
                             ? f.n() / (4.0 * f.extent)
                             : f.extent;
  int j = 0;
  while (std::pow(4.0, j + 1) * u_hi <= nyquist) ++j;
  return j;
}

}  // namespace

DecayProbe decay_probe(const Field& spatial, const PhaseSpacePoint& p,
                       const Lattice& lat, int j_lo, int j_hi, const WindowSpec& w) {
  if (spatial.domain != Field::Domain::Spatial) {
    throw std::invalid_argument("decay_probe expects a spatial field");
  }
  if (j_lo < 1 || j_hi < j_lo) throw std::invalid_argument("decay_probe: bad j range");
  DecayProbe probe;
  probe.point = p;
  probe.j_usable_hi = usable_scale(spatial, w);
  for (int j = j_lo; j <= j_hi; ++j) {
    const GridParams gp = grid_params(p, lat, j);
    const Complex c = spatial_coefficient(spatial, w, j, gp.k, gp.lambda);
    ProbeRecord rec;
    rec.j = j;
    rec.k = gp.k;
    rec.m = gp.m;
    rec.abs_coeff = std::abs(c);
    rec.log4_abs = rec.abs_coeff > 0 ? std::log(rec.abs_coeff) / std::log(4.0)
                                     : -std::numeric_limits<double>::infinity();
    probe.records.push_back(rec);
  }
  probe.rate = fit_rate(probe.records);
  return probe;
}

DecayProbe decay_probe_dual(const Field& spatial, const PhaseSpacePoint& p,
                            const Lattice& lat, int j_lo, int j_hi,
                            const DualWindow& dual) {
  if (spatial.domain != Field::Domain::Spatial) {
    throw std::invalid_argument("decay_probe_dual expects a spatial field");
  }
  Field fhat = to_frequency(spatial);
  if (fhat.n() != dual.m_tilde.grid.n ||
      std::abs(fhat.extent - dual.m_tilde.grid.extent) > 1e-9 * fhat.extent) {
    throw std::invalid_argument("decay_probe_dual: grid does not match dual");
  }
  Field ghat = fhat;
  ghat.samples.array() /= dual.m_tilde.values.array();
  Field g = to_spatial(ghat);

  // fringe points: 0 < eta < 1, i.e. |phi^| in (eps/2, eps); below eps/2 the
  // psi packet vanishes, above eps it coincides with phi.
  const int n = ghat.n();
  const FreqGrid grid{ghat.extent, n};
  DecayProbe probe;
  probe.point = p;
  probe.j_usable_hi = usable_scale(spatial, dual.base);
  const double dxi2 = grid.spacing() * grid.spacing();
  for (int j = j_lo; j <= j_hi; ++j) {
    const GridParams gp = grid_params(p, lat, j);
    Complex c = spatial_coefficient(g, dual.base, j, gp.k, gp.lambda);
    // correction <g^, (psi - phi)_idx> on the cutoff fringe
    const Eigen::Matrix2d b = packet_dual_matrix<double>({j, gp.k});
    const Eigen::Vector2d center =
        packet_matrix<double>({j, gp.k}).inverse() * gp.lambda;
    const double nf = std::pow(8.0, -0.5 * j);
    Complex corr(0, 0);
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = grid.coord(i2);
      for (int i1 = 0; i1 < n; ++i1) {
        const double x1 = grid.coord(i1);
        const double u = b(0, 0) * x1 + b(0, 1) * x2;
        const double v = b(1, 0) * x1 + b(1, 1) * x2;
        const double val = dual.base(u, v);
        const double a = std::abs(val);
        if (a <= 1e-18 || a >= dual.epsilon) continue;
        const double diff = eval_psi_hat(dual.base, dual.epsilon, u, v) - val;
        const double ph = kTwoPi * (x1 * center(0) + x2 * center(1));
        corr += ghat.samples(i1, i2) * diff * nf *
                Complex(std::cos(ph), std::sin(ph));
      }
    }
    c += dxi2 * corr;
    ProbeRecord rec;
    rec.j = j;
    rec.k = gp.k;
    rec.m = gp.m;
    rec.abs_coeff = std::abs(c);
    rec.log4_abs = rec.abs_coeff > 0 ? std::log(rec.abs_coeff) / std::log(4.0)
                                     : -std::numeric_limits<double>::infinity();
    probe.records.push_back(rec);
  }
  probe.rate = fit_rate(probe.records);
  return probe;
}

double sobolev_statistic(const DecayProbe& probe, double s) {
  double acc = 0.0;
  for (const auto& r : probe.records) {
    acc += r.abs_coeff * r.abs_coeff * std::pow(4.0, 2.0 * s * r.j);
  }
  return acc;
}

Field WavefrontMap::classification() const {
  const int n_probes = static_cast<int>(probes.size()) / options.n_angles;
  if (n_probes != options.n_angles) {
    throw std::runtime_error(
        "classification field requires nx*ny == n_angles (square layout)");
  }
  Field out = make_field(options.n_angles, 1.0, Field::Domain::Spatial);
  for (int p = 0; p < n_probes; ++p) {
    for (int a = 0; a < options.n_angles; ++a) {
      out.samples(a, p) = flagged[p * options.n_angles + a] ? 1.0 : 0.0;
    }
  }
  return out;
}

WavefrontMap wavefront_map(const Field& spatial, const Lattice& lat,
                           const WindowSpec& w, const WavefrontOptions& opts,
                           const DualWindow* dual) {
  if (opts.use_dual && dual == nullptr) {
    throw std::invalid_argument("wavefront_map: dual options require a dual window");
  }
  WavefrontMap map;
  map.options = opts;
  map.f_norm = l2_norm(spatial);
  const double norm2 = std::max(map.f_norm * map.f_norm, 1e-300);
  const double half = opts.probe_box_fraction * spatial.extent;
  for (int iy = 0; iy < opts.ny; ++iy) {
    for (int ix = 0; ix < opts.nx; ++ix) {
      const double x1 = opts.nx > 1 ? -half + 2.0 * half * ix / (opts.nx - 1) : 0.0;
      const double x2 = opts.ny > 1 ? -half + 2.0 * half * iy / (opts.ny - 1) : 0.0;
      for (int a = 0; a < opts.n_angles; ++a) {
        const PhaseSpacePoint p =
            make_phase_point(x1, x2, kTwoPi * a / opts.n_angles);
        const DecayProbe probe =
            opts.use_dual ? decay_probe_dual(spatial, p, lat, opts.j_lo, opts.j_hi, *dual)
                          : decay_probe(spatial, p, lat, opts.j_lo, opts.j_hi, w);
        const double stat = sobolev_statistic(probe, opts.s) / norm2;
        map.probes.push_back(p);
        map.statistics.push_back(stat);
        map.flagged.push_back(stat >= opts.threshold);
      }
    }
  }
  return map;
}

void save_probe_report(const DecayProbe& probe, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# j k_j lambda_m1 lambda_m2 abs_coeff log4_abs\n";
  char buf[160];
  for (const auto& r : probe.records) {
    std::snprintf(buf, sizeof buf, "%d %d %d %d %.12e %.9f\n", r.j, r.k, r.m(0),
                  r.m(1), r.abs_coeff, r.log4_abs);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# rate %.9f usable_j_hi %d\n", probe.rate,
                probe.j_usable_hi);
  out << buf;
}

Field make_test_signal(SignalKind kind, const SignalParams& params, int n,
                       double extent) {
  Field f = make_field(n, extent, Field::Domain::Spatial);
  const Eigen::Vector2d c = params.center;
  const double w2 = params.width * params.width;
  const Eigen::Vector2d n1(std::cos(params.angle), std::sin(params.angle));
  const Eigen::Vector2d n2(std::cos(params.angle2), std::sin(params.angle2));
  for (int i2 = 0; i2 < n; ++i2) {
    const double x2 = f.coord(i2);
    for (int i1 = 0; i1 < n; ++i1) {
      const Eigen::Vector2d x(f.coord(i1), x2);
      const Eigen::Vector2d d = x - c;
      const double window = std::exp(-d.squaredNorm() / w2);
      double val = 0.0;
      switch (kind) {
        case SignalKind::Bump:
          val = window;
          break;
        case SignalKind::Edge:
          val = (n1.dot(d) <= 0.0 ? 1.0 : 0.0) * window;
          break;
        case SignalKind::Corner:
          val = std::min(n1.dot(d) <= 0.0 ? 1.0 : 0.0, n2.dot(d) <= 0.0 ? 1.0 : 0.0) *
                window;
          break;
      }
      f.samples(i1, i2) = val;
    }
  }
  return f;
}

}  // namespace parapack
