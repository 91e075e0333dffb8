#include "qpg/dispersion.hpp"

#include <cmath>
#include <sstream>

namespace qpg {

SellmeierModel SellmeierModel::congruent_lithium_niobate() {
  SellmeierModel m;
  m.ordinary = {4.9048, 0.11775, 0.21802, 0.027153, 2.2314e-8, -2.9671e-8, 2.1429e-8};
  m.extraordinary = {4.5820, 0.09921, 0.21090, 0.021940, 5.2716e-8, -4.9143e-8, 2.2971e-7};
  m.reference_temperature_c = 24.5;
  m.wavelength_min_um = 0.4;
  m.wavelength_max_um = 4.0;
  m.temperature_min_c = 0.0;
  m.temperature_max_c = 400.0;
  return m;
}

double refractive_index(const SellmeierModel& model, double wavelength_nm,
                        double temperature_c, Axis axis) {
  const double lam = wavelength_nm * 1e-3;  // um
  if (!(lam >= model.wavelength_min_um && lam <= model.wavelength_max_um)) {
    std::ostringstream os;
    os << "wavelength " << wavelength_nm << " nm outside Sellmeier validity ["
       << model.wavelength_min_um * 1e3 << ", " << model.wavelength_max_um * 1e3 << "] nm";
    throw RangeError(os.str());
  }
  if (!(temperature_c >= model.temperature_min_c && temperature_c <= model.temperature_max_c)) {
    std::ostringstream os;
    os << "temperature " << temperature_c << " C outside Sellmeier validity ["
       << model.temperature_min_c << ", " << model.temperature_max_c << "] C";
    throw RangeError(os.str());
  }
  const auto& c = axis == Axis::ordinary ? model.ordinary : model.extraordinary;
  const double t0 = model.reference_temperature_c;
  const double f = (temperature_c - t0) * (temperature_c + t0 + 2.0 * 273.16);
  const double res = c.A3 + c.B2 * f;
  const double n2 =
      c.A1 + (c.A2 + c.B1 * f) / (lam * lam - res * res) + c.B3 * f - c.A4 * lam * lam;
  if (!(n2 > 1.0) || !std::isfinite(n2)) {
    throw RangeError("Sellmeier evaluation left the physical branch (n^2 <= 1)");
  }
  return std::sqrt(n2);
}

void ProcessConfig::finalize() {
  if (!(length_mm > 0.0)) throw ConfigError("length_mm must be > 0");
  if (!(poling_period_um > 0.0)) throw ConfigError("poling_period_um must be > 0");
  if (qpm_order % 2 == 0) throw ConfigError("qpm_order must be odd");
  const double derived = 1.0 / (1.0 / signal_center_nm + 1.0 / pump_center_nm);
  if (output_center_nm == 0.0) {
    output_center_nm = derived;
  } else if (std::abs(output_center_nm - derived) > 1e-9 * derived) {
    throw ConfigError("center wavelengths violate energy conservation");
  }
}

void DeltaBetaProfile::validate() const {
  if (offsets.size() < 1) throw ConfigError("profile needs at least one section");
  if (boundaries_mm.size() != offsets.size() + 1) {
    throw ConfigError("profile boundary count must be section count + 1");
  }
  if (boundaries_mm(0) != 0.0) throw ConfigError("profile must start at z = 0");
  for (Eigen::Index i = 0; i + 1 < boundaries_mm.size(); ++i) {
    if (!(boundaries_mm(i + 1) > boundaries_mm(i))) {
      throw ConfigError("profile boundaries must be strictly increasing");
    }
  }
  if (!offsets.allFinite()) throw ConfigError("profile offsets must be finite");
}

DeltaBetaProfile DeltaBetaProfile::uniform(int sections, double length_mm) {
  DeltaBetaProfile p;
  p.boundaries_mm = Eigen::VectorXd::LinSpaced(sections + 1, 0.0, length_mm);
  p.offsets = Eigen::VectorXd::Zero(sections);
  return p;
}

namespace {

double wavenumber(const SellmeierModel& m, double omega, double temperature_c, Axis axis) {
  const double lam_nm = nm_from_omega(omega);
  return omega / kSpeedOfLight * refractive_index(m, lam_nm, temperature_c, axis);
}

double taylor_delta_beta(const TaylorDispersionModel& m, double omega_s, double omega_p) {
  const double ds = omega_s - m.signal_ref;
  const double dp = omega_p - m.pump_ref;
  const double dout = (omega_s + omega_p) - m.output_ref;
  return m.delta_beta_ref + m.signal_beta1 * ds + m.pump_beta1 * dp + m.output_beta1 * dout +
         0.5 * (m.signal_beta2 * ds * ds + m.pump_beta2 * dp * dp + m.output_beta2 * dout * dout);
}

}  // namespace

double delta_beta(const ProcessConfig& config, const DispersionModel& model,
                  double omega_s, double omega_p) {
  double db;
  if (const auto* sm = std::get_if<SellmeierModel>(&model)) {
    const double t = config.temperature_c;
    const double ks = wavenumber(*sm, omega_s, t, config.signal_axis);
    const double kp = wavenumber(*sm, omega_p, t, config.pump_axis);
    const double ko = wavenumber(*sm, omega_s + omega_p, t, config.output_axis);
    db = ks + kp - ko;
  } else {
    db = taylor_delta_beta(std::get<TaylorDispersionModel>(model), omega_s, omega_p);
  }
  return db - config.grating_vector() + config.delta_beta_offset;
}

Eigen::MatrixXd delta_beta_map(const ProcessConfig& config, const DispersionModel& model,
                               const Eigen::VectorXd& signal_grid,
                               const Eigen::VectorXd& pump_grid) {
  for (const auto* g : {&signal_grid, &pump_grid}) {
    for (Eigen::Index i = 0; i + 1 < g->size(); ++i) {
      if (!((*g)(i + 1) > (*g)(i))) throw ConfigError("delta_beta_map grids must be monotone");
    }
  }
  Eigen::MatrixXd out(signal_grid.size(), pump_grid.size());
  for (Eigen::Index j = 0; j < pump_grid.size(); ++j) {
    for (Eigen::Index i = 0; i < signal_grid.size(); ++i) {
      out(i, j) = delta_beta(config, model, signal_grid(i), pump_grid(j));
    }
  }
  return out;
}

double width_to_delta_beta(double width_deviation_um, const ProcessConfig& config) {
  if (!config.width_sensitivity) {
    throw ConfigError("width_sensitivity_per_m_per_um is not configured");
  }
  return *config.width_sensitivity * width_deviation_um;
}

double delta_beta_to_width(double delta_beta_per_m, const ProcessConfig& config) {
  if (!config.width_sensitivity) {
    throw ConfigError("width_sensitivity_per_m_per_um is not configured");
  }
  return delta_beta_per_m / *config.width_sensitivity;
}

TaylorDispersionModel fit_taylor(const ProcessConfig& config, const DispersionModel& model,
                                 double signal_span, double pump_span) {
  const auto* sm = std::get_if<SellmeierModel>(&model);
  if (!sm) throw ConfigError("fit_taylor expects a Sellmeier backend");

  TaylorDispersionModel t;
  t.signal_ref = omega_from_nm(config.signal_center_nm);
  t.pump_ref = omega_from_nm(config.pump_center_nm);
  t.output_ref = t.signal_ref + t.pump_ref;

  // Per-field central differences of k(omega); the output field enters with a
  // minus sign so the cross term -k_o'' is carried by output_beta2 alone.
  const double temp = config.temperature_c;
  auto expand = [&](double ref, Axis axis, double h, double sign, double& b1, double& b2) {
    const double km = wavenumber(*sm, ref - h, temp, axis);
    const double k0 = wavenumber(*sm, ref, temp, axis);
    const double kp = wavenumber(*sm, ref + h, temp, axis);
    b1 = sign * (kp - km) / (2 * h);
    b2 = sign * (kp - 2 * k0 + km) / (h * h);
    return sign * k0;
  };
  const double h_out = std::min(signal_span, pump_span);
  double k = 0.0;
  k += expand(t.signal_ref, config.signal_axis, signal_span, +1.0, t.signal_beta1,
              t.signal_beta2);
  k += expand(t.pump_ref, config.pump_axis, pump_span, +1.0, t.pump_beta1, t.pump_beta2);
  k += expand(t.output_ref, config.output_axis, h_out, -1.0, t.output_beta1, t.output_beta2);
  t.delta_beta_ref = k;
  return t;
}

}  // namespace qpg
