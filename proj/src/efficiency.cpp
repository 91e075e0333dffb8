#include "qpg/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qpg/units.hpp"

namespace qpg {

double conversion_efficiency(double eta_norm, double pump_power_w, double length_cm) {
  if (eta_norm < 0.0 || pump_power_w < 0.0 || length_cm < 0.0) {
    throw ConfigError("conversion_efficiency arguments must be >= 0");
  }
  const double s = std::sin(std::sqrt(eta_norm * pump_power_w) * length_cm);
  return s * s;
}

double unit_efficiency_power_w(double eta_norm, double length_cm) {
  if (!(eta_norm > 0.0 && length_cm > 0.0)) {
    throw ConfigError("unit_efficiency_power requires eta_norm > 0 and L > 0");
  }
  const double x = kPi / (2.0 * length_cm);
  return x * x / eta_norm;
}

EtaNormFit fit_eta_norm(const std::vector<EfficiencyPoint>& points, double length_cm) {
  if (!(length_cm > 0.0)) throw ConfigError("fit_eta_norm requires L > 0");
  std::set<double> powers;
  for (const auto& p : points) {
    if (p.power_w < 0.0 || p.efficiency < 0.0 || p.efficiency > 1.0) {
      throw ConfigError("efficiency points must have power >= 0 and efficiency in [0, 1]");
    }
    powers.insert(p.power_w);
  }
  if (powers.size() < 2) throw ConfigError("fit_eta_norm needs >= 2 distinct pump powers");

  auto sse = [&](double eta_norm) {
    double acc = 0.0;
    for (const auto& p : points) {
      const double d = conversion_efficiency(eta_norm, p.power_w, length_cm) - p.efficiency;
      acc += d * d;
    }
    return acc;
  };

  // Bracket from the closed-form single-point inversions, then golden-section.
  double hi = 0.0;
  for (const auto& p : points) {
    if (p.power_w > 0.0 && p.efficiency > 0.0) {
      const double inv =
          std::pow(std::asin(std::sqrt(p.efficiency)) / length_cm, 2) / p.power_w;
      hi = std::max(hi, inv);
    }
  }
  if (hi == 0.0) throw ConfigError("fit_eta_norm: all points are degenerate (zero)");
  double lo = 0.0;
  hi *= 4.0;
  constexpr double kGolden = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = sse(x1), f2 = sse(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGolden * (b - a); f1 = sse(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGolden * (b - a); f2 = sse(x2);
    }
  }
  EtaNormFit fit;
  fit.eta_norm = 0.5 * (a + b);

  const auto n = static_cast<double>(points.size());
  const double dof = std::max(1.0, n - 1.0);
  const double variance = sse(fit.eta_norm) / dof;
  fit.residual_rms = std::sqrt(sse(fit.eta_norm) / n);

  // Gauss-Newton curvature of the model at the optimum for the standard error.
  double jtj = 0.0;
  const double h = std::max(1e-8, 1e-6 * fit.eta_norm);
  for (const auto& p : points) {
    const double g = (conversion_efficiency(fit.eta_norm + h, p.power_w, length_cm) -
                      conversion_efficiency(fit.eta_norm - h, p.power_w, length_cm)) /
                     (2.0 * h);
    jtj += g * g;
  }
  const double se = jtj > 0.0 ? std::sqrt(variance / jtj) : 0.0;
  fit.ci95_low = fit.eta_norm - 1.96 * se;
  fit.ci95_high = fit.eta_norm + 1.96 * se;

  const double quarter_wave_arg = kPi / 2.0;
  for (const auto& p : points) {
    if (std::sqrt(fit.eta_norm * p.power_w) * length_cm > quarter_wave_arg) {
      fit.beyond_first_quarter_wave = true;
    }
  }
  return fit;
}

std::vector<EfficiencyPoint> read_efficiency_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::vector<EfficiencyPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.find("power") != std::string::npos) continue;  // header row
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'power_W,efficiency'", lineno);
    try {
      pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw ParseError("malformed number in '" + line + "'", lineno);
    }
  }
  if (pts.empty()) throw ParseError("no data rows in '" + path + "'");
  return pts;
}

}  // namespace qpg
