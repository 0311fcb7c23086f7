#include "parapack/window.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "parapack/field.hpp"

namespace parapack {

DecayReport verify_decay_assumptions(const WindowSpec& w, double extent, int grid_n) {
  DecayReport rep;
  if (w.terms.empty()) return rep;

  // varsigma: log-log slope of |phi^(r, 0)| as r -> 0. Sample a dyadic ladder
  // below the narrowest feature width.
  double wmax = 0.0;
  for (const auto& g : w.terms) wmax = std::max(wmax, g.width1);
  const double r0 = 0.25 / std::sqrt(wmax);
  std::vector<double> lx, ly;
  for (int i = 0; i < 14; ++i) {
    const double r = r0 * std::pow(0.5, 0.5 * i);
    const double v = std::abs(w(r, 0.0));
    if (v > 1e-280) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(v));
    }
  }
  if (lx.size() >= 3) {
    const int m = static_cast<int>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.varsigma = std::max(0.0, slope);
  }

  // delta: most conservative Gaussian rate seen on the far part of the grid.
  const double h = 2.0 * extent / grid_n;
  double delta = std::numeric_limits<double>::infinity();
  for (int i2 = 0; i2 < grid_n; ++i2) {
    const double x2 = -extent + (i2 + 0.5) * h;
    for (int i1 = 0; i1 < grid_n; ++i1) {
      const double x1 = -extent + (i1 + 0.5) * h;
      const double r2 = x1 * x1 + x2 * x2;
      if (r2 < 0.25 * extent * extent) continue;
      const double v = std::abs(w(x1, x2));
      if (v < 1e-280) continue;
      const double cap = std::min(1.0, std::pow(std::abs(x1), rep.varsigma));
      if (cap < 1e-280) continue;
      delta = std::min(delta, -std::log(v / cap) / r2);
    }
  }
  if (!std::isfinite(delta)) {
    // window numerically zero on the far region; fall back to term rates
    delta = std::numeric_limits<double>::infinity();
    for (const auto& g : w.terms) delta = std::min(delta, std::min(g.width1, g.width2));
  }
  rep.delta = std::max(0.0, delta);

  double ratio = 0.0;
  for (int i2 = 0; i2 < grid_n; ++i2) {
    const double x2 = -extent + (i2 + 0.5) * h;
    for (int i1 = 0; i1 < grid_n; ++i1) {
      const double x1 = -extent + (i1 + 0.5) * h;
      const double cap = std::min(1.0, std::pow(std::abs(x1), rep.varsigma)) *
                         std::exp(-rep.delta * (x1 * x1 + x2 * x2));
      if (cap < 1e-280) continue;
      ratio = std::max(ratio, std::abs(w(x1, x2)) / cap);
    }
  }
  rep.max_ratio = ratio;
  rep.varsigma_above_two = rep.varsigma > 2.0;
  return rep;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void save_window_file(const WindowFile& wf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "[meta]\n";
  out << "moment_order = " << wf.window.moment_order << "\n";
  if (wf.has_coarse) {
    out << "\n[phi0]\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", wf.coarse.sigma);
    out << "sigma = " << buf << "\n";
  }
  for (const auto& g : wf.window.terms) {
    out << "\n[term]\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", g.amplitude);
    out << "amplitude = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", g.center);
    out << "center = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", g.width1);
    out << "width1 = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", g.width2);
    out << "width2 = " << buf << "\n";
  }
}

WindowFile load_window_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  WindowFile wf;
  std::string section;
  GaussianTerm term;
  bool in_term = false;
  auto flush_term = [&]() {
    if (in_term) {
      if (!(term.width1 > 0) || !(term.width2 > 0)) {
        throw std::runtime_error("window term widths must be positive");
      }
      wf.window.terms.push_back(term);
      in_term = false;
    }
  };
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("unterminated section header", line_offset);
      flush_term();
      section = line.substr(1, line.size() - 2);
      if (section == "term") {
        term = GaussianTerm{};
        in_term = true;
      } else if (section != "meta" && section != "phi0") {
        throw FormatError("unknown section [" + section + "]", line_offset);
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected key = value", line_offset);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    char* end = nullptr;
    const double x = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0') {
      throw FormatError("bad numeric value '" + val + "'", line_offset);
    }
    if (section == "meta" && key == "moment_order") {
      wf.window.moment_order = static_cast<int>(x);
    } else if (section == "phi0" && key == "sigma") {
      wf.coarse.sigma = x;
      wf.has_coarse = true;
    } else if (section == "term") {
      if (key == "amplitude") term.amplitude = x;
      else if (key == "center") term.center = x;
      else if (key == "width1") term.width1 = x;
      else if (key == "width2") term.width2 = x;
      else throw FormatError("unknown term key '" + key + "'", line_offset);
    } else {
      throw FormatError("unknown key '" + key + "' in section [" + section + "]",
                        line_offset);
    }
  }
  flush_term();
  if (wf.window.terms.empty()) throw std::runtime_error("window file has no terms");
  return wf;
}

}  // namespace parapack
