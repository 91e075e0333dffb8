#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>

#include "qpg/errors.hpp"
#include "qpg/units.hpp"

namespace qpg {

enum class Axis { ordinary, extraordinary };

/// Temperature-dependent Sellmeier model,
///   n^2 = A1 + (A2 + B1 F)/(lambda^2 - (A3 + B2 F)^2) + B3 F - A4 lambda^2,
/// with lambda in um and F = (T - T0)(T + T0 + 2*273.16), T in Celsius.
struct SellmeierModel {
  struct AxisCoefficients {
    double A1, A2, A3, A4;
    double B1, B2, B3;
  };

  AxisCoefficients ordinary;
  AxisCoefficients extraordinary;
  double reference_temperature_c = 24.5;
  double wavelength_min_um = 0.4;
  double wavelength_max_um = 4.0;
  double temperature_min_c = 0.0;
  double temperature_max_c = 400.0;

  /// Edwards & Lawrence (1984) coefficients for congruent lithium niobate.
  static SellmeierModel congruent_lithium_niobate();
};

/// Refractive index at wavelength [nm], temperature [C]. Throws RangeError
/// outside the validity window; never extrapolates silently.
double refractive_index(const SellmeierModel& model, double wavelength_nm,
                        double temperature_c, Axis axis);

/// Second-order Taylor expansion of the mismatch around reference frequencies:
///   db = db_ref + sum_f (beta1_f * d_f + beta2_f/2 * d_f^2)
/// with d_f the detuning of field f from its reference and the output sign
/// folded into its coefficients (beta1 entries are the signed d(db)/d(omega_f)).
struct TaylorDispersionModel {
  double signal_ref = 0.0;  // rad/s
  double pump_ref = 0.0;    // rad/s
  double output_ref = 0.0;  // rad/s
  double delta_beta_ref = 0.0;       // 1/m at the reference point
  double signal_beta1 = 0.0;         // s/m, d(db)/d(omega_s) at fixed omega_o
  double pump_beta1 = 0.0;           // s/m
  double output_beta1 = 0.0;         // s/m, d(db)/d(omega_o) contribution
  double signal_beta2 = 0.0;         // s^2/m
  double pump_beta2 = 0.0;           // s^2/m
  double output_beta2 = 0.0;         // s^2/m
};

struct ProcessConfig {
  double signal_center_nm = 1550.0;
  double pump_center_nm = 856.548;
  double output_center_nm = 0.0;  // 0 = derive from energy conservation
  double poling_period_um = 4.4;
  int qpm_order = -1;  // odd, may be negative; -1 matches the design point here
  double temperature_c = 200.0;
  double length_mm = 71.0;
  Axis signal_axis = Axis::ordinary;
  Axis pump_axis = Axis::extraordinary;
  Axis output_axis = Axis::ordinary;
  double delta_beta_offset = 0.0;  // 1/m, absorbs unmodeled waveguide dispersion
  std::optional<double> width_sensitivity = {};  // (1/m)/um, Fig.-8-style axis

  /// Fills output_center_nm from 1/lo = 1/ls + 1/lp and checks invariants.
  void finalize();
  double length_m() const { return length_mm * 1e-3; }
  double grating_vector() const {
    return 2.0 * kPi * static_cast<double>(qpm_order) / (poling_period_um * 1e-6);
  }
};

/// Piecewise-constant phase-mismatch offset over [0, L].
struct DeltaBetaProfile {
  Eigen::VectorXd boundaries_mm;  // size m+1, strictly increasing, [0, L]
  Eigen::VectorXd offsets;        // size m, 1/m

  int sections() const { return static_cast<int>(offsets.size()); }
  double length_mm() const { return boundaries_mm(boundaries_mm.size() - 1); }
  void validate() const;

  /// m equal sections over [0, length_mm], all offsets zero.
  static DeltaBetaProfile uniform(int sections, double length_mm);
};

using DispersionModel = std::variant<SellmeierModel, TaylorDispersionModel>;

/// Quasi-phase-matched mismatch k_s + k_p - k_o - 2*pi*order/Lambda [1/m].
double delta_beta(const ProcessConfig& config, const DispersionModel& model,
                  double omega_s, double omega_p);

/// Elementwise delta_beta over the outer product of the two grids;
/// entry (i, j) pairs signal_grid[i] with pump_grid[j].
Eigen::MatrixXd delta_beta_map(const ProcessConfig& config, const DispersionModel& model,
                               const Eigen::VectorXd& signal_grid,
                               const Eigen::VectorXd& pump_grid);

/// Equivalent-width linear map and its inverse.
double width_to_delta_beta(double width_deviation_um, const ProcessConfig& config);
double delta_beta_to_width(double delta_beta_per_m, const ProcessConfig& config);

/// Least-squares fit of a TaylorDispersionModel to any model around the
/// config's center frequencies (finite differences, expansion order 2).
TaylorDispersionModel fit_taylor(const ProcessConfig& config, const DispersionModel& model,
                                 double signal_span = 2e12, double pump_span = 2e12);

}  // namespace qpg
