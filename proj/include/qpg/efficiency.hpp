#pragma once

#include <string>
#include <vector>

#include "qpg/errors.hpp"

namespace qpg {

struct EfficiencyPoint {
  double power_w = 0.0;
  double efficiency = 0.0;  // in [0, 1]
};

/// eta = sin^2( sqrt(eta_norm * P_p) * L ), eta_norm in 1/(W cm^2), L in cm.
/// Over-rotation past the first quarter wave is returned as-is.
double conversion_efficiency(double eta_norm, double pump_power_w, double length_cm);

/// Smallest pump power with eta = 1: P = (pi / (2 L))^2 / eta_norm [W].
double unit_efficiency_power_w(double eta_norm, double length_cm);

struct EtaNormFit {
  double eta_norm = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double residual_rms = 0.0;
  bool beyond_first_quarter_wave = false;  // ambiguous-branch warning
};

/// Least-squares fit of the efficiency curve to measured depletion points.
EtaNormFit fit_eta_norm(const std::vector<EfficiencyPoint>& points, double length_cm);

/// Two-column CSV `power_W,efficiency` (header line optional).
std::vector<EfficiencyPoint> read_efficiency_csv(const std::string& path);

}  // namespace qpg
