#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "qpg/dispersion.hpp"
#include "qpg/spectrum.hpp"

namespace qpg {

/// Hermite-Gaussian spectral pump envelope. `sigma` is the 1/e intensity
/// half-width of the order-0 Gaussian; the order-n envelope is
/// H_n(x) exp(-x^2/2) with x = (omega - center)/sigma, L2-normalized on the
/// evaluation grid. Chirp adds exp(i chirp (omega-center)^2 / 2).
struct PumpEnvelope {
  int order = 0;
  double center_nm = 856.548;
  double sigma = 2.0 * kPi * 963e9;  // rad/s
  double chirp = 0.0;                // s^2

  double center_omega() const { return omega_from_nm(center_nm); }
};

/// Physicists' Hermite polynomial H_n.
double hermite(int n, double x);

/// Outer 1/e-intensity crossing x of H_n(x)exp(-x^2/2), relative to order 0
/// (order 0 -> 1). Divide sigma by this to give every order the same 1/e
/// intensity bandwidth.
double hg_one_over_e_scale(int order);

/// Envelope samples on `omega_axis` [rad/s], L2-normalized with the grid
/// measure. Throws when the axis does not span +-5 sigma around the center.
Eigen::VectorXcd pump_envelope(const PumpEnvelope& pump, const Eigen::VectorXd& omega_axis);

/// 1/e intensity half-width of the uniform sinc^2 along omega_o at fixed
/// signal frequency [rad/s].
double pm_one_over_e_width(const ProcessConfig& config, const DispersionModel& model);

struct JsaGrid {
  Eigen::VectorXd signal_axis;  // rad/s
  Eigen::VectorXd output_axis;  // rad/s
  Eigen::MatrixXcd amplitude;   // (signal, output)
  double temperature_c = 0.0;
};

struct JsaGridSpec {
  int signal_samples = 512;
  int output_samples = 512;
  double pump_sigma_span = 5.0;  // half-span in pump sigma units
  double pm_width_span = 8.0;    // half-span in phase-matching 1/e widths
};

/// JSA(i, j) = phi(omega_s_i, omega_o_j) * alpha(omega_o_j - omega_s_i).
/// The signal axis spans the pump-sigma window around the signal center; the
/// output axis spans the union of the pump and phase-matching windows.
JsaGrid build_jsa(const ProcessConfig& config, const DispersionModel& model,
                  const std::optional<DeltaBetaProfile>& profile, const PumpEnvelope& pump,
                  const JsaGridSpec& spec = {});

struct SchmidtDecomposition {
  Eigen::VectorXd coefficients;  // rho_n, descending, sum = 1
  Eigen::MatrixXcd signal_modes; // column n = u_n on the signal grid (weighted-orthonormal)
  Eigen::MatrixXcd output_modes; // column n = v_n on the output grid
  Eigen::VectorXd signal_axis;
  Eigen::VectorXd output_axis;
  double amplitude_norm = 0.0;   // Frobenius norm of the weighted JSA
};

/// SVD of the amplitude matrix weighted by sqrt(grid measure) per axis;
/// squared singular values normalized to sum 1.
SchmidtDecomposition schmidt_decompose(const JsaGrid& jsa);

/// S = rho_m^2 under the sum(rho) = 1 normalization.
double selectivity(const SchmidtDecomposition& d, int mode);

/// -10 log10(P1/P0) [dB].
double extinction_ratio_db(double p1, double p0);

/// Alternative reporting form -10 log10(sqrt(S)).
double extinction_from_selectivity_db(double s);

/// Ratio of 1/e bandwidths, both in frequency units.
double bandwidth_compression(double input_bandwidth_ghz, double output_bandwidth_ghz);

struct ProjectionConfig {
  PumpEnvelope pump;                  // order-0 parameters; order is overridden
  double signal_sigma = 0.0;          // 0 = match pump sigma
  bool equal_intensity_bandwidth = true;  // rescale higher orders to order-0 1/e width
  int signal_samples = 1024;
  int output_samples = 4001;
};

/// Up-converted power for the order-n pump against a fixed order-0 signal
/// mode: P_n = int d(omega_o) | int d(omega_s) JSA_n psi(omega_s) |^2.
double mode_projection_power(const ProcessConfig& config, const DispersionModel& model,
                             const std::optional<DeltaBetaProfile>& profile,
                             const ProjectionConfig& proj, int pump_order);

}  // namespace qpg
