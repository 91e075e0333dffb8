#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>

#include "qpg/errors.hpp"

namespace qpg {

enum class AxisKind { wavelength_nm, angular_frequency, detuning };

std::string to_string(AxisKind kind);
AxisKind axis_kind_from_string(const std::string& s);

enum class BandwidthMetric { fwhm, one_over_e };

/// 1D sampled intensity spectrum; axis strictly monotone increasing.
struct Spectrum {
  AxisKind axis_kind = AxisKind::wavelength_nm;
  Eigen::VectorXd axis;
  Eigen::VectorXd intensity;
  std::optional<Eigen::VectorXcd> amplitude;

  double temperature_c = 0.0;
  std::string device_id;
  double resolution_sigma = 0.0;  // in axis units; 0 = not specified

  void validate() const;
  Eigen::Index size() const { return axis.size(); }

  /// Scales so the peak intensity is 1 (amplitudes scaled consistently).
  Spectrum peak_normalized() const;
};

/// Gaussian instrument-resolution kernel; sigma in axis units, 0 = identity.
struct ResolutionKernel {
  double sigma = 0.0;
};

/// Linear interpolation of s onto new_axis (same axis kind). Points outside
/// the source range take the nearest edge value.
Spectrum resample(const Spectrum& s, const Eigen::VectorXd& new_axis);

/// Discrete Gaussian convolution with reflective boundary handling; requires
/// a uniform axis. Conserves the intensity sum to 1e-9 relative.
Spectrum convolve_resolution(const Spectrum& s, const ResolutionKernel& kernel);

/// Width of the main lobe by linear interpolation between samples:
/// fwhm = outermost half-max crossings; one_over_e = half-width at peak/e.
double bandwidth(const Spectrum& s, BandwidthMetric metric);

/// wavelength <-> angular frequency conversion (nu = c/lambda). The sample
/// order is flipped to keep the axis increasing; intensities are carried over
/// sample-by-sample (no Jacobian reweighting: these are measured-intensity
/// curves, not densities).
Spectrum axis_convert(const Spectrum& s, AxisKind to);

/// Mean squared difference on the measurement axis; both curves are peak
/// normalized and `sim` is resampled onto the overlapping range of meas.axis.
double spectrum_mse(const Spectrum& sim, const Spectrum& meas);

/// CSV with one `# axis=... unit=... temperature_C=... resolution_sigma=...`
/// header line and `axis,intensity` rows at 17 significant digits.
void write_spectrum_csv(const Spectrum& s, const std::string& path);
Spectrum read_spectrum_csv(const std::string& path);

}  // namespace qpg
