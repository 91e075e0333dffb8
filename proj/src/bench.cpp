#include "qpg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qpg/efficiency.hpp"
#include "qpg/phasematch.hpp"
#include "qpg/units.hpp"

namespace qpg {

using nlohmann::json;

void LiteratureEntry::validate() const {
  if (!(length_mm > 0.0)) throw ConfigError("literature entry needs length > 0");
  if (!(output_center_nm > 0.0)) throw ConfigError("output center wavelength must be > 0");
  const bool any = output_bandwidth_nm || selectivity_db || bandwidth_compression ||
                   internal_efficiency || eta_norm;
  if (!any) throw ConfigError("literature entry '" + citation + "' carries no metric");
  if (internal_efficiency && (*internal_efficiency < 0.0 || *internal_efficiency > 1.0)) {
    throw ConfigError("internal efficiency must be in [0, 1]");
  }
}

std::optional<double> LiteratureEntry::bandwidth_ghz() const {
  if (output_bandwidth_ghz) return output_bandwidth_ghz;
  if (!output_bandwidth_nm) return std::nullopt;
  const double lambda_m = output_center_nm * 1e-9;
  return kSpeedOfLight * (*output_bandwidth_nm * 1e-9) / (lambda_m * lambda_m) * 1e-9;
}

namespace {

constexpr const char* kLiteratureHeader =
    "length_mm,output_bandwidth_nm,selectivity_db,bandwidth_compression,"
    "internal_efficiency,eta_norm_per_w_cm2,output_center_nm,output_bandwidth_ghz,citation";

std::string cell(const std::optional<double>& v) {
  return v ? format_shortest(*v) : std::string();
}

std::optional<double> parse_cell(const std::string& s, int lineno) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + s + "'", lineno);
  }
}

}  // namespace

std::vector<LiteratureEntry> read_literature_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::vector<LiteratureEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("length_mm", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) {
      throw ParseError("expected 9 columns, got " + std::to_string(cells.size()), lineno);
    }
    LiteratureEntry e;
    e.length_mm = parse_cell(cells[0], lineno).value_or(0.0);
    e.output_bandwidth_nm = parse_cell(cells[1], lineno);
    e.selectivity_db = parse_cell(cells[2], lineno);
    e.bandwidth_compression = parse_cell(cells[3], lineno);
    e.internal_efficiency = parse_cell(cells[4], lineno);
    e.eta_norm = parse_cell(cells[5], lineno);
    if (auto v = parse_cell(cells[6], lineno)) e.output_center_nm = *v;
    e.output_bandwidth_ghz = parse_cell(cells[7], lineno);
    e.citation = cells[8];
    e.validate();
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_literature_csv(const std::vector<LiteratureEntry>& entries, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << kLiteratureHeader << "\n";
  for (const auto& e : entries) {
    e.validate();
    f << format_shortest(e.length_mm) << ',' << cell(e.output_bandwidth_nm) << ','
      << cell(e.selectivity_db) << ',' << cell(e.bandwidth_compression) << ','
      << cell(e.internal_efficiency) << ',' << cell(e.eta_norm) << ','
      << format_shortest(e.output_center_nm) << ',' << cell(e.output_bandwidth_ghz) << ','
      << e.citation << "\n";
  }
}

double optimal_pump_sigma(const ProcessConfig& config, const DispersionModel& model,
                          const ProjectionConfig& proj) {
  const double pm_width = pm_one_over_e_width(config, model);
  auto power0 = [&](double sigma) {
    ProjectionConfig p = proj;
    p.pump.sigma = sigma;
    return mode_projection_power(config, model, std::nullopt, p, 0);
  };
  constexpr double kGolden = 0.6180339887498949;
  // The conversion-optimal pump sits near the signal bandwidth, which for long
  // devices lies far above the phase-matching width; the bracket must cover
  // both scales or the search rails at the boundary.
  const double sigma_signal = proj.signal_sigma > 0.0 ? proj.signal_sigma : proj.pump.sigma;
  double a = 0.1 * pm_width, b = std::max(10.0 * pm_width, 3.0 * sigma_signal);
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = power0(x1), f2 = power0(x2);
  for (int it = 0; it < 48; ++it) {
    if (f1 > f2) {  // maximize
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGolden * (b - a); f1 = power0(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGolden * (b - a); f2 = power0(x2);
    }
  }
  return 0.5 * (a + b);
}

namespace {

double ideal_output_one_over_e_nm(const ProcessConfig& config, const DispersionModel& model) {
  const double pm_width = pm_one_over_e_width(config, model);  // rad/s
  const double lambda_m = config.output_center_nm * 1e-9;
  // rad/s -> nm around the output center, for sizing the scan window.
  const double width_nm = pm_width * lambda_m * lambda_m / (2.0 * kPi * kSpeedOfLight) * 1e9;
  ScanAxis scan;
  scan.mode = ScanMode::output_fixed_signal;
  scan.span_nm = 40.0 * width_nm;
  scan.samples = 4001;
  return bandwidth(pm_spectrum(config, model, std::nullopt, scan), BandwidthMetric::one_over_e);
}

void parallel_map(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<SweepRow> sweep_length(const ProcessConfig& config_template,
                                   const DispersionModel& model,
                                   const std::vector<double>& lengths_mm,
                                   const ProjectionConfig& proj, int threads) {
  for (double l : lengths_mm) {
    if (!(l > 0.0)) throw ConfigError("sweep lengths must be > 0");
  }
  std::vector<SweepRow> rows(lengths_mm.size());
  parallel_map(static_cast<int>(lengths_mm.size()), threads, [&](int i) {
    ProcessConfig cfg = config_template;
    cfg.length_mm = lengths_mm[i];
    cfg.finalize();

    const double pm_width = pm_one_over_e_width(cfg, model);
    const double lambda_m = cfg.output_center_nm * 1e-9;
    const double width_nm = pm_width * lambda_m * lambda_m / (2.0 * kPi * kSpeedOfLight) * 1e9;
    ScanAxis scan;
    scan.mode = ScanMode::output_fixed_signal;
    scan.span_nm = 40.0 * width_nm;
    scan.samples = 4001;
    const double fwhm =
        bandwidth(pm_spectrum(cfg, model, std::nullopt, scan), BandwidthMetric::fwhm);

    const double sigma = optimal_pump_sigma(cfg, model, proj);
    ProjectionConfig p = proj;
    p.pump.sigma = sigma;
    const double p0 = mode_projection_power(cfg, model, std::nullopt, p, 0);
    const double p1 = mode_projection_power(cfg, model, std::nullopt, p, 1);
    rows[i] = {lengths_mm[i], fwhm, extinction_ratio_db(p1, p0), sigma};
  });
  return rows;
}

EfficiencyCurves efficiency_curves(const std::vector<LiteratureEntry>& entries,
                                   const Eigen::VectorXd& power_axis_w) {
  if (power_axis_w.size() < 2) throw ConfigError("efficiency power axis needs >= 2 points");
  EfficiencyCurves out;
  for (const auto& e : entries) {
    if (!e.eta_norm) {
      out.warnings.push_back("entry '" + e.citation + "' has no eta_norm; skipped");
      continue;
    }
    EfficiencyCurve c;
    c.citation = e.citation;
    c.eta_norm = *e.eta_norm;
    c.length_cm = e.length_mm * 0.1;
    c.power_w = power_axis_w;
    c.efficiency.resize(power_axis_w.size());
    for (Eigen::Index i = 0; i < power_axis_w.size(); ++i) {
      c.efficiency(i) = conversion_efficiency(c.eta_norm, power_axis_w(i), c.length_cm);
    }
    c.unit_power_w = unit_efficiency_power_w(c.eta_norm, c.length_cm);
    out.curves.push_back(std::move(c));
  }
  return out;
}

ComparisonReport comparison_report(const std::vector<LiteratureEntry>& entries,
                                   const ProcessConfig& config_template,
                                   const DispersionModel& model) {
  ComparisonReport report;
  for (const auto& e : entries) {
    e.validate();
    ComparisonRow row;
    row.entry = e;
    if (auto ghz = e.bandwidth_ghz()) {
      row.computed_compression = report.input_bandwidth_ghz / *ghz;
    }
    ProcessConfig cfg = config_template;
    cfg.length_mm = e.length_mm;
    cfg.finalize();
    row.ideal_one_over_e_nm = ideal_output_one_over_e_nm(cfg, model);
    if (e.output_bandwidth_nm) {
      row.wider_than_ideal = *e.output_bandwidth_nm > row.ideal_one_over_e_nm;
      row.anomalous_narrow = *e.output_bandwidth_nm < row.ideal_one_over_e_nm;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string comparison_report_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "# input_bandwidth_ghz=" << format_shortest(report.input_bandwidth_ghz) << "\n";
  out << kLiteratureHeader << ",computed_compression,ideal_one_over_e_nm,"
      << "wider_than_ideal,anomalous_narrow\n";
  for (const auto& r : report.rows) {
    const auto& e = r.entry;
    out << format_shortest(e.length_mm) << ',' << cell(e.output_bandwidth_nm) << ','
        << cell(e.selectivity_db) << ',' << cell(e.bandwidth_compression) << ','
        << cell(e.internal_efficiency) << ',' << cell(e.eta_norm) << ','
        << format_shortest(e.output_center_nm) << ',' << cell(e.output_bandwidth_ghz) << ','
        << e.citation << ',' << cell(r.computed_compression) << ','
        << format_shortest(r.ideal_one_over_e_nm) << ','
        << (e.output_bandwidth_nm ? (r.wider_than_ideal ? "yes" : "no") : "") << ','
        << (e.output_bandwidth_nm ? (r.anomalous_narrow ? "yes" : "no") : "") << "\n";
  }
  return out.str();
}

std::string comparison_report_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    const auto& e = r.entry;
    json j{{"length_mm", e.length_mm},
           {"output_center_nm", e.output_center_nm},
           {"citation", e.citation},
           {"ideal_one_over_e_nm", r.ideal_one_over_e_nm}};
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) j[key] = *v;
    };
    put("output_bandwidth_nm", e.output_bandwidth_nm);
    put("selectivity_db", e.selectivity_db);
    put("bandwidth_compression", e.bandwidth_compression);
    put("internal_efficiency", e.internal_efficiency);
    put("eta_norm_per_w_cm2", e.eta_norm);
    put("output_bandwidth_ghz", e.output_bandwidth_ghz);
    put("computed_compression", r.computed_compression);
    if (e.output_bandwidth_nm) {
      j["wider_than_ideal"] = r.wider_than_ideal;
      j["anomalous_narrow"] = r.anomalous_narrow;
    }
    rows.push_back(std::move(j));
  }
  json doc{{"input_bandwidth_ghz", report.input_bandwidth_ghz}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

}  // namespace qpg
