#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qpg/dispersion.hpp"
#include "qpg/modes.hpp"

namespace qpg {

/// One published frequency-conversion result. Optional fields are metrics the
/// source did not report. `output_center_nm` anchors the nm <-> GHz bandwidth
/// conversion; `output_bandwidth_ghz`, when present, overrides that conversion
/// (used when a source quotes the compression from a frequency-domain width
/// that is inconsistent with its printed nm value).
struct LiteratureEntry {
  double length_mm = 0.0;
  std::optional<double> output_bandwidth_nm;
  std::optional<double> selectivity_db;
  std::optional<double> bandwidth_compression;
  std::optional<double> internal_efficiency;  // fraction in [0, 1]
  std::optional<double> eta_norm;             // 1/(W cm^2)
  double output_center_nm = 551.68;
  std::optional<double> output_bandwidth_ghz;
  std::string citation;

  void validate() const;
  /// Output bandwidth in GHz: the explicit override if present, otherwise
  /// c * d_lambda / lambda^2 from the nm column.
  std::optional<double> bandwidth_ghz() const;
};

/// Versioned CSV dataset, one row per entry; blank cells are absent metrics.
std::vector<LiteratureEntry> read_literature_csv(const std::string& path);
void write_literature_csv(const std::vector<LiteratureEntry>& entries, const std::string& path);

struct SweepRow {
  double length_mm = 0.0;
  double fwhm_nm = 0.0;          // ideal phase-matching FWHM, output scan
  double extinction_db = 0.0;    // order-0 vs order-1 projection, optimal pump
  double pump_sigma = 0.0;       // optimizing pump 1/e half-width [rad/s]
};

/// Pump 1/e half-width [rad/s] maximizing the order-0 projected power for
/// this device, found by golden-section search from 0.1 x the phase-matching
/// 1/e width up to max(10 x that width, 3 x the signal width).
double optimal_pump_sigma(const ProcessConfig& config, const DispersionModel& model,
                          const ProjectionConfig& proj);

/// Ideal-device FWHM and extinction for each length. The signal mode is held
/// fixed (the projection config's signal width); the pump is re-optimized per
/// length, so extinction grows as the phase-matching function narrows.
std::vector<SweepRow> sweep_length(const ProcessConfig& config_template,
                                   const DispersionModel& model,
                                   const std::vector<double>& lengths_mm,
                                   const ProjectionConfig& proj, int threads = 1);

struct EfficiencyCurve {
  std::string citation;
  double eta_norm = 0.0;   // 1/(W cm^2)
  double length_cm = 0.0;
  Eigen::VectorXd power_w;
  Eigen::VectorXd efficiency;
  double unit_power_w = 0.0;  // first power reaching efficiency 1
};

struct EfficiencyCurves {
  std::vector<EfficiencyCurve> curves;
  std::vector<std::string> warnings;  // entries skipped for missing eta_norm
  double measured_point_power_w = 0.004;
  double measured_point_efficiency = 0.18;
};

/// Conversion-efficiency curves eta(P) for every entry carrying eta_norm.
EfficiencyCurves efficiency_curves(const std::vector<LiteratureEntry>& entries,
                                   const Eigen::VectorXd& power_axis_w);

struct ComparisonRow {
  LiteratureEntry entry;
  std::optional<double> computed_compression;  // 963 GHz / output bandwidth
  double ideal_one_over_e_nm = 0.0;            // uniform device at this length
  bool wider_than_ideal = false;               // the common inhomogeneity signature
  bool anomalous_narrow = false;               // below the ideal limit (filtered)
};

struct ComparisonReport {
  double input_bandwidth_ghz = 963.0;
  std::vector<ComparisonRow> rows;
};

/// Derived columns recomputed from the raw entries: compression against the
/// fixed input bandwidth and the ideal uniform-device bandwidth at each length
/// (the template config with the length swapped in).
ComparisonReport comparison_report(const std::vector<LiteratureEntry>& entries,
                                   const ProcessConfig& config_template,
                                   const DispersionModel& model);

/// Deterministic serializations (shortest round-trip number formatting).
std::string comparison_report_csv(const ComparisonReport& report);
std::string comparison_report_json(const ComparisonReport& report);

}  // namespace qpg
