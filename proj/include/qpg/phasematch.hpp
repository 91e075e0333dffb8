#pragma once

#include <complex>
#include <optional>

#include "qpg/dispersion.hpp"
#include "qpg/spectrum.hpp"

namespace qpg {

/// Uniform-waveguide phase-matching amplitude
///   (1/L) int_0^L exp(i db z) dz = exp(i db L / 2) sinc(db L / 2).
std::complex<double> pm_uniform(double delta_beta_per_m, double length_m);

/// Piecewise-constant profile, closed form per section with accumulated phase.
std::complex<double> pm_profile(const DeltaBetaProfile& profile, double delta_beta_global);

/// How pm_spectrum walks the (omega_s, omega_p) plane while one variable scans.
enum class ScanMode {
  signal_fixed_pump,  // axis = signal wavelength, pump held at its center
  output_fixed_signal // axis = output wavelength, signal held at its center
};

struct ScanAxis {
  ScanMode mode = ScanMode::signal_fixed_pump;
  double center_nm = 0.0;  // 0 = config center for the scanned field
  double span_nm = 4.0;
  int samples = 2001;
};

/// Phase-matching intensity spectrum |phi|^2 over the scan axis, amplitudes
/// retained; peak normalized unless keep_scale.
Spectrum pm_spectrum(const ProcessConfig& config, const DispersionModel& model,
                     const std::optional<DeltaBetaProfile>& profile, const ScanAxis& scan,
                     bool keep_scale = false);

}  // namespace qpg
