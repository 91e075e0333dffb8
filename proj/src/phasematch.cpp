#include "qpg/phasematch.hpp"

#include <cmath>

namespace qpg {

std::complex<double> pm_uniform(double delta_beta_per_m, double length_m) {
  if (!(length_m > 0.0)) throw ConfigError("pm_uniform requires L > 0");
  const double x = 0.5 * delta_beta_per_m * length_m;
  return std::polar(sinc(x), x);
}

std::complex<double> pm_profile(const DeltaBetaProfile& profile, double delta_beta_global) {
  profile.validate();
  const double length_m = profile.length_mm() * 1e-3;
  std::complex<double> acc(0.0, 0.0);
  double phase = 0.0;  // accumulated int_0^z db(z') dz'
  for (int j = 0; j < profile.sections(); ++j) {
    const double seg = (profile.boundaries_mm(j + 1) - profile.boundaries_mm(j)) * 1e-3;
    const double b = delta_beta_global + profile.offsets(j);
    // int_{z_j}^{z_{j+1}} exp(i Phi_j + i b (z - z_j)) dz
    acc += std::polar(seg * sinc(0.5 * b * seg), phase + 0.5 * b * seg);
    phase += b * seg;
  }
  return acc / length_m;
}

Spectrum pm_spectrum(const ProcessConfig& config, const DispersionModel& model,
                     const std::optional<DeltaBetaProfile>& profile, const ScanAxis& scan,
                     bool keep_scale) {
  if (scan.samples < 1) throw ConfigError("scan needs at least one sample");
  if (profile) {
    profile->validate();
    if (std::abs(profile->length_mm() - config.length_mm) > 1e-9 * config.length_mm) {
      throw ConfigError("profile length does not match the configured device length");
    }
  }
  const bool signal_scan = scan.mode == ScanMode::signal_fixed_pump;
  const double center =
      scan.center_nm != 0.0 ? scan.center_nm
                            : (signal_scan ? config.signal_center_nm : config.output_center_nm);

  Spectrum s;
  s.axis_kind = AxisKind::wavelength_nm;
  s.temperature_c = config.temperature_c;
  if (scan.samples == 1) {
    s.axis = Eigen::VectorXd::Constant(1, center);
  } else {
    s.axis = Eigen::VectorXd::LinSpaced(scan.samples, center - 0.5 * scan.span_nm,
                                        center + 0.5 * scan.span_nm);
  }
  s.intensity.resize(scan.samples);
  s.amplitude = Eigen::VectorXcd(scan.samples);

  const double omega_pump = omega_from_nm(config.pump_center_nm);
  const double omega_signal = omega_from_nm(config.signal_center_nm);
  const double length_m = config.length_m();
  for (Eigen::Index i = 0; i < s.axis.size(); ++i) {
    double ws, wp;
    if (signal_scan) {
      ws = omega_from_nm(s.axis(i));
      wp = omega_pump;
    } else {
      ws = omega_signal;
      wp = omega_from_nm(s.axis(i)) - omega_signal;  // omega_o scans, signal held
    }
    const double db = delta_beta(config, model, ws, wp);
    const std::complex<double> amp = profile ? pm_profile(*profile, db) : pm_uniform(db, length_m);
    (*s.amplitude)(i) = amp;
    s.intensity(i) = std::norm(amp);
  }
  if (!keep_scale) {
    const double peak = s.intensity.maxCoeff();
    if (peak > 0.0) {
      s.intensity /= peak;
      *s.amplitude /= std::sqrt(peak);
    }
  }
  return s;
}

}  // namespace qpg
