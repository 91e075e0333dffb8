// Command-line front end: every library pipeline behind one binary with
// subcommands, reproducible run manifests, and atomic output files.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qpg/bench.hpp"
#include "qpg/configio.hpp"
#include "qpg/efficiency.hpp"
#include "qpg/inverse.hpp"
#include "qpg/modes.hpp"
#include "qpg/phasematch.hpp"
#include "qpg/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw qpg::ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(ss.str())));
  return buf;
}

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

/// Looks for the path as given, then under $QPG_CONFIG_DIR.
std::string resolve_config(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("QPG_CONFIG_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw qpg::ConfigError("config file '" + path + "' not found");
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw qpg::ConfigError("cannot write '" + tmp.string() + "'");
    f << content;
  }
  fs::rename(tmp, path);
}

void atomic_write_spectrum(const qpg::Spectrum& s, const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  qpg::write_spectrum_csv(s, tmp.string());
  fs::rename(tmp, path);
}

/// Per-run provenance record: config and input digests plus the output list.
struct Manifest {
  std::string subcommand;
  std::string config_path;
  std::string started_at = iso_now();
  json inputs = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;

  void add_input(const std::string& path) { inputs[path] = file_digest(path); }

  void write(const fs::path& out_dir) {
    json j{{"subcommand", subcommand},
           {"tool_version", kVersion},
           {"config_path", config_path},
           {"config_hash", config_path.empty() ? "" : file_digest(config_path)},
           {"inputs", inputs},
           {"started_at", started_at},
           {"finished_at", iso_now()},
           {"outputs", outputs}};
    if (seed) j["seed"] = *seed;
    for (const auto& o : outputs) {
      if (!fs::exists(o)) throw qpg::ConfigError("manifest lists missing output '" + o + "'");
    }
    atomic_write(out_dir / "manifest.json", j.dump(2) + "\n");
  }
};

struct ScanFlags {
  std::string mode = "signal";
  double center_nm = 0.0;
  double span_nm = 4.0;
  int samples = 2001;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scan-mode", mode, "signal | output")
        ->check(CLI::IsMember({"signal", "output"}));
    cmd->add_option("--center-nm", center_nm, "scan center (0 = config center)");
    cmd->add_option("--span-nm", span_nm, "scan span");
    cmd->add_option("--samples", samples, "scan samples")->check(CLI::PositiveNumber);
  }

  qpg::ScanAxis to_scan() const {
    qpg::ScanAxis s;
    s.mode = mode == "output" ? qpg::ScanMode::output_fixed_signal
                              : qpg::ScanMode::signal_fixed_pump;
    s.center_nm = center_nm;
    s.span_nm = span_nm;
    s.samples = samples;
    return s;
  }
};

double pump_sigma_nm_to_rad_s(double sigma_nm, double center_nm) {
  const double lambda_m = center_nm * 1e-9;
  return 2.0 * qpg::kPi * qpg::kSpeedOfLight * sigma_nm * 1e-9 / (lambda_m * lambda_m);
}

std::string mse_trace_csv(const qpg::FitResult& fit) {
  std::ostringstream out;
  out << "generation,best_mse,median_mse\n";
  for (std::size_t g = 0; g < fit.best_trace.size(); ++g) {
    out << g << ',' << qpg::format_shortest(fit.best_trace[g]) << ','
        << qpg::format_shortest(fit.median_trace[g]) << "\n";
  }
  return out.str();
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << qpg::format_shortest(m(i, j));
    }
    out << "\n";
  }
  return out.str();
}

std::string vector_csv(const std::string& header, const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << header << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << qpg::format_shortest(v(i)) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
};

int run_simulate_pm(const CommonOpts& common, const ScanFlags& scan_flags,
                    double length_mm, double temperature_c, const std::string& profile_path,
                    double resolution_nm) {
  Manifest manifest;
  manifest.subcommand = "simulate-pm";
  manifest.config_path = resolve_config(common.config_path);

  const qpg::ConfigFile cfg = qpg::ConfigFile::parse_file(manifest.config_path);
  qpg::ProcessConfig pc = qpg::load_process_config(cfg);
  if (length_mm > 0.0) pc.length_mm = length_mm;
  if (temperature_c != 0.0) pc.temperature_c = temperature_c;
  const qpg::DispersionModel model = qpg::load_dispersion_model(cfg);

  std::optional<qpg::DeltaBetaProfile> profile;
  if (!profile_path.empty()) {
    manifest.add_input(profile_path);
    profile = qpg::read_profile_csv(profile_path);
  }

  qpg::Spectrum s = qpg::pm_spectrum(pc, model, profile, scan_flags.to_scan());
  if (resolution_nm > 0.0) {
    s = qpg::convolve_resolution(s, {resolution_nm});
    s.resolution_sigma = resolution_nm;
  }
  const fs::path out(common.out_dir);
  atomic_write_spectrum(s, out / "spectrum.csv");
  manifest.outputs.push_back((out / "spectrum.csv").string());
  manifest.write(out);
  std::cout << "wrote " << (out / "spectrum.csv").string() << "\n";
  return 0;
}

struct PumpFlags {
  int order = 0;
  double center_nm = 0.0;   // 0 = config
  double sigma_nm = 0.0;    // 0 = config sigma

  void attach(CLI::App* cmd) {
    cmd->add_option("--pump-order", order, "Hermite-Gauss pump order");
    cmd->add_option("--pump-center-nm", center_nm, "pump central wavelength");
    cmd->add_option("--pump-sigma-nm", sigma_nm, "pump 1/e intensity half-width [nm]");
  }

  qpg::PumpEnvelope to_pump(const qpg::ConfigFile& cfg) const {
    qpg::PumpEnvelope pump = qpg::load_pump(cfg);
    pump.order = order;
    if (center_nm > 0.0) pump.center_nm = center_nm;
    if (sigma_nm > 0.0) pump.sigma = pump_sigma_nm_to_rad_s(sigma_nm, pump.center_nm);
    return pump;
  }
};

int run_jsa(const CommonOpts& common, const PumpFlags& pump_flags, const std::string& profile_path,
            int signal_samples, int output_samples, bool with_schmidt) {
  Manifest manifest;
  manifest.subcommand = with_schmidt ? "schmidt" : "jsa";
  manifest.config_path = resolve_config(common.config_path);

  const qpg::ConfigFile cfg = qpg::ConfigFile::parse_file(manifest.config_path);
  const qpg::ProcessConfig pc = qpg::load_process_config(cfg);
  const qpg::DispersionModel model = qpg::load_dispersion_model(cfg);
  qpg::PumpEnvelope pump = pump_flags.to_pump(cfg);

  std::optional<qpg::DeltaBetaProfile> profile;
  if (!profile_path.empty()) {
    manifest.add_input(profile_path);
    profile = qpg::read_profile_csv(profile_path);
  }

  qpg::JsaGridSpec spec;
  spec.signal_samples = signal_samples;
  spec.output_samples = output_samples;
  const qpg::JsaGrid jsa = qpg::build_jsa(pc, model, profile, pump, spec);

  const fs::path out(common.out_dir);
  atomic_write(out / "jsa_signal_axis.csv", vector_csv("signal_omega_rad_s", jsa.signal_axis));
  atomic_write(out / "jsa_output_axis.csv", vector_csv("output_omega_rad_s", jsa.output_axis));
  atomic_write(out / "jsa_intensity.csv", matrix_csv(jsa.amplitude.cwiseAbs2()));
  manifest.outputs = {(out / "jsa_signal_axis.csv").string(),
                      (out / "jsa_output_axis.csv").string(),
                      (out / "jsa_intensity.csv").string()};

  if (with_schmidt) {
    const qpg::SchmidtDecomposition dec = qpg::schmidt_decompose(jsa);
    qpg::ProjectionConfig proj;
    proj.pump = pump;
    const double p0 = qpg::mode_projection_power(pc, model, profile, proj, 0);
    const double p1 = qpg::mode_projection_power(pc, model, profile, proj, 1);
    json j{{"schmidt_coefficients",
            std::vector<double>(dec.coefficients.begin(), dec.coefficients.end())},
           {"selectivity", qpg::selectivity(dec, 0)},
           {"extinction_db_from_selectivity",
            qpg::extinction_from_selectivity_db(qpg::selectivity(dec, 0))},
           {"projection_power_order0", p0},
           {"projection_power_order1", p1},
           {"extinction_db_projection", qpg::extinction_ratio_db(p1, p0)}};
    atomic_write(out / "schmidt.json", j.dump(2) + "\n");
    manifest.outputs.push_back((out / "schmidt.json").string());
  }
  manifest.write(out);
  std::cout << "wrote " << manifest.outputs.size() << " files under " << common.out_dir << "\n";
  return 0;
}

int run_fit_profile(const CommonOpts& common, const std::string& measurement_path,
                    std::optional<std::uint64_t> seed, int sections, int generations,
                    int population, int threads, double resolution_nm,
                    const std::string& scan_mode, int resume_generation, bool no_checkpoints,
                    bool timing) {
  Manifest manifest;
  manifest.subcommand = "fit-profile";
  manifest.config_path = resolve_config(common.config_path);
  manifest.add_input(measurement_path);

  const qpg::ConfigFile cfg = qpg::ConfigFile::parse_file(manifest.config_path);
  qpg::ObjectiveContext ctx;
  ctx.config = qpg::load_process_config(cfg);
  ctx.model = qpg::load_dispersion_model(cfg);
  ctx.scan_mode = scan_mode == "output" ? qpg::ScanMode::output_fixed_signal
                                        : qpg::ScanMode::signal_fixed_pump;

  const qpg::Spectrum measured = qpg::read_spectrum_csv(measurement_path);
  ctx.kernel.sigma = resolution_nm > 0.0 ? resolution_nm : measured.resolution_sigma;

  qpg::GaConfig ga = qpg::load_ga_config(cfg);
  if (seed) ga.seed = *seed;
  if (sections > 0) ga.sections = sections;
  if (generations > 0) ga.generations = generations;
  if (population > 0) ga.population = population;
  if (threads > 0) ga.threads = threads;
  manifest.seed = ga.seed;

  const fs::path out(common.out_dir);
  const std::string checkpoints = no_checkpoints ? "" : (out / "checkpoints").string();
  const qpg::FitResult fit = qpg::run_fit(measured, ga, ctx, checkpoints, resume_generation);

  atomic_write(out / "fit.json", qpg::fit_result_to_json(fit, timing));
  atomic_write_spectrum(ctx.simulate(fit.best_profile, measured), out / "best_spectrum.csv");
  atomic_write(out / "mse_trace.csv", mse_trace_csv(fit));
  {
    const fs::path tmp = (out / "best_profile.csv").string() + ".tmp";
    qpg::write_profile_csv(fit.best_profile, tmp.string());
    fs::rename(tmp, out / "best_profile.csv");
  }
  manifest.outputs = {(out / "fit.json").string(), (out / "best_spectrum.csv").string(),
                      (out / "mse_trace.csv").string(), (out / "best_profile.csv").string()};
  manifest.write(out);
  std::cout << "best MSE " << fit.best_mse << " after " << fit.evaluations
            << " objective evaluations\n";
  return 0;
}

int run_efficiency(const CommonOpts& common, const std::string& data_path, double length_cm) {
  Manifest manifest;
  manifest.subcommand = "efficiency";
  manifest.add_input(data_path);

  const auto points = qpg::read_efficiency_csv(data_path);
  const qpg::EtaNormFit fit = qpg::fit_eta_norm(points, length_cm);
  const double unit_power = qpg::unit_efficiency_power_w(fit.eta_norm, length_cm);

  json j{{"eta_norm_per_w_cm2", fit.eta_norm},
         {"ci95", {fit.ci95_low, fit.ci95_high}},
         {"residual_rms", fit.residual_rms},
         {"beyond_first_quarter_wave", fit.beyond_first_quarter_wave},
         {"length_cm", length_cm},
         {"unit_efficiency_power_w", unit_power}};
  const fs::path out(common.out_dir);
  atomic_write(out / "eta_norm.json", j.dump(2) + "\n");

  std::ostringstream curve;
  curve << "power_W,efficiency\n";
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    const double p = 1.2 * unit_power * i / (n - 1);
    curve << qpg::format_shortest(p) << ','
          << qpg::format_shortest(qpg::conversion_efficiency(fit.eta_norm, p, length_cm)) << "\n";
  }
  atomic_write(out / "efficiency_curve.csv", curve.str());
  manifest.outputs = {(out / "eta_norm.json").string(), (out / "efficiency_curve.csv").string()};
  manifest.write(out);
  std::cout << "eta_norm = " << fit.eta_norm << " 1/(W cm^2)\n";
  return 0;
}

int run_bench(const CommonOpts& common, const std::string& table_path, bool do_sweep,
              std::vector<double> lengths_mm, int threads, double power_max_w) {
  Manifest manifest;
  manifest.subcommand = "bench";
  manifest.config_path = resolve_config(common.config_path);
  manifest.add_input(table_path);

  const qpg::ConfigFile cfg = qpg::ConfigFile::parse_file(manifest.config_path);
  const qpg::ProcessConfig pc = qpg::load_process_config(cfg);
  const qpg::DispersionModel model = qpg::load_dispersion_model(cfg);
  const auto entries = qpg::read_literature_csv(table_path);

  const fs::path out(common.out_dir);
  const qpg::ComparisonReport report = qpg::comparison_report(entries, pc, model);
  atomic_write(out / "comparison.csv", qpg::comparison_report_csv(report));
  atomic_write(out / "comparison.json", qpg::comparison_report_json(report));
  manifest.outputs = {(out / "comparison.csv").string(), (out / "comparison.json").string()};

  const Eigen::VectorXd powers = Eigen::VectorXd::LinSpaced(201, 0.0, power_max_w);
  const qpg::EfficiencyCurves curves = qpg::efficiency_curves(entries, powers);
  for (const auto& w : curves.warnings) std::cerr << "warning: " << w << "\n";
  std::ostringstream ec;
  ec << "citation,eta_norm_per_w_cm2,length_cm,unit_power_w,power_W,efficiency\n";
  for (const auto& c : curves.curves) {
    for (Eigen::Index i = 0; i < c.power_w.size(); ++i) {
      ec << c.citation << ',' << qpg::format_shortest(c.eta_norm) << ','
         << qpg::format_shortest(c.length_cm) << ',' << qpg::format_shortest(c.unit_power_w)
         << ',' << qpg::format_shortest(c.power_w(i)) << ','
         << qpg::format_shortest(c.efficiency(i)) << "\n";
    }
  }
  atomic_write(out / "efficiency_curves.csv", ec.str());
  manifest.outputs.push_back((out / "efficiency_curves.csv").string());

  if (do_sweep) {
    if (lengths_mm.empty()) lengths_mm = {10, 20, 30, 40, 50, 60, 70, 80};
    qpg::ProjectionConfig proj;
    proj.pump = qpg::load_pump(cfg);
    const auto rows = qpg::sweep_length(pc, model, lengths_mm, proj, threads);
    std::ostringstream sw;
    sw << "length_mm,fwhm_nm,extinction_db,pump_sigma_rad_s\n";
    for (const auto& r : rows) {
      sw << qpg::format_shortest(r.length_mm) << ',' << qpg::format_shortest(r.fwhm_nm) << ','
         << qpg::format_shortest(r.extinction_db) << ',' << qpg::format_shortest(r.pump_sigma)
         << "\n";
    }
    atomic_write(out / "sweep.csv", sw.str());
    manifest.outputs.push_back((out / "sweep.csv").string());
  }
  manifest.write(out);
  std::cout << "wrote " << manifest.outputs.size() << " files under " << common.out_dir << "\n";
  return 0;
}

int run_predict(const CommonOpts& common, const ScanFlags& scan_flags,
                const std::string& profile_path, const std::string& extra_path,
                double resolution_nm) {
  Manifest manifest;
  manifest.subcommand = "predict";
  manifest.config_path = resolve_config(common.config_path);
  manifest.add_input(profile_path);

  const qpg::ConfigFile cfg = qpg::ConfigFile::parse_file(manifest.config_path);
  const qpg::ProcessConfig pc = qpg::load_process_config(cfg);
  const qpg::DispersionModel model = qpg::load_dispersion_model(cfg);
  const qpg::DeltaBetaProfile profile = qpg::read_profile_csv(profile_path);
  std::optional<qpg::DeltaBetaProfile> extra;
  if (!extra_path.empty()) {
    manifest.add_input(extra_path);
    extra = qpg::read_profile_csv(extra_path);
  }

  qpg::Spectrum s = qpg::predict_at_conditions(profile, pc, model, scan_flags.to_scan(), extra);
  if (resolution_nm > 0.0) {
    s = qpg::convolve_resolution(s, {resolution_nm});
    s.resolution_sigma = resolution_nm;
  }
  const fs::path out(common.out_dir);
  atomic_write_spectrum(s, out / "spectrum.csv");
  manifest.outputs.push_back((out / "spectrum.csv").string());
  manifest.write(out);
  std::cout << "wrote " << (out / "spectrum.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-phase-matched sum-frequency conversion: simulation, "
               "benchmarks, and profile retrieval"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts common;
  int exit_code = 0;
  auto guard = [&](auto&& fn) {
    try {
      exit_code = fn();
    } catch (const qpg::ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      exit_code = 2;
    } catch (const qpg::ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      exit_code = 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      exit_code = 1;
    }
  };

  // simulate-pm -------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate-pm", "Phase-matching spectrum");
  ScanFlags sim_scan;
  double sim_length = 0.0, sim_temp = 0.0, sim_res = 0.0;
  std::string sim_profile;
  sim->add_option("--config", common.config_path, "device config file")->required();
  sim->add_option("--out", common.out_dir, "output directory");
  sim->add_option("--length-mm", sim_length, "override device length");
  sim->add_option("--temperature-c", sim_temp, "override temperature");
  sim->add_option("--profile", sim_profile, "delta-beta profile CSV");
  sim->add_option("--resolution-nm", sim_res, "Gaussian resolution sigma");
  sim_scan.attach(sim);
  sim->callback([&]() {
    guard([&]() {
      return run_simulate_pm(common, sim_scan, sim_length, sim_temp, sim_profile, sim_res);
    });
  });

  // jsa / schmidt -----------------------------------------------------------
  PumpFlags pump_flags;
  std::string jsa_profile;
  int jsa_signal_samples = 512, jsa_output_samples = 512;
  for (const bool with_schmidt : {false, true}) {
    auto* cmd = app.add_subcommand(with_schmidt ? "schmidt" : "jsa",
                                   with_schmidt
                                       ? "Schmidt decomposition, selectivity, extinction"
                                       : "Joint spectral amplitude grid");
    cmd->add_option("--config", common.config_path, "device config file")->required();
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--profile", jsa_profile, "delta-beta profile CSV");
    cmd->add_option("--signal-samples", jsa_signal_samples, "");
    cmd->add_option("--output-samples", jsa_output_samples, "");
    pump_flags.attach(cmd);
    cmd->callback([&, with_schmidt]() {
      guard([&]() {
        return run_jsa(common, pump_flags, jsa_profile, jsa_signal_samples, jsa_output_samples,
                       with_schmidt);
      });
    });
  }

  // fit-profile -------------------------------------------------------------
  auto* fit = app.add_subcommand("fit-profile", "Retrieve a delta-beta profile from a spectrum");
  std::string fit_measurement, fit_scan_mode = "signal";
  std::uint64_t fit_seed = 0;
  bool fit_seed_set = false, fit_no_checkpoints = false, fit_timing = false;
  int fit_sections = 0, fit_generations = 0, fit_population = 0, fit_threads = 0;
  int fit_resume = -1;
  double fit_res = 0.0;
  fit->add_option("measurement", fit_measurement, "measured spectrum CSV")->required();
  fit->add_option("--config", common.config_path, "device + GA config file")->required();
  fit->add_option("--out", common.out_dir, "output directory");
  fit->add_option("--seed", fit_seed, "RNG seed")->each([&](const std::string&) {
    fit_seed_set = true;
  });
  fit->add_option("--sections", fit_sections, "profile sections");
  fit->add_option("--generations", fit_generations, "GA generations");
  fit->add_option("--population", fit_population, "GA population");
  fit->add_option("--threads", fit_threads, "parallel objective evaluation");
  fit->add_option("--resolution-nm", fit_res, "override the measurement's resolution sigma");
  fit->add_option("--scan-mode", fit_scan_mode, "signal | output")
      ->check(CLI::IsMember({"signal", "output"}));
  fit->add_option("--resume", fit_resume, "resume from this checkpoint generation");
  fit->add_flag("--no-checkpoints", fit_no_checkpoints, "skip per-generation checkpoints");
  fit->add_flag("--timing", fit_timing, "include wall time in fit.json");
  fit->callback([&]() {
    guard([&]() {
      return run_fit_profile(common, fit_measurement,
                             fit_seed_set ? std::optional<std::uint64_t>(fit_seed) : std::nullopt,
                             fit_sections, fit_generations, fit_population, fit_threads, fit_res,
                             fit_scan_mode, fit_resume, fit_no_checkpoints, fit_timing);
    });
  });

  // efficiency --------------------------------------------------------------
  auto* eff = app.add_subcommand("efficiency", "Fit eta_norm to depletion measurements");
  std::string eff_data;
  double eff_length_cm = 7.1;
  eff->add_option("data", eff_data, "CSV of power_W,efficiency")->required();
  eff->add_option("--length-cm", eff_length_cm, "device length [cm]");
  eff->add_option("--out", common.out_dir, "output directory");
  eff->callback([&]() { guard([&]() { return run_efficiency(common, eff_data, eff_length_cm); }); });

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Literature comparison and length sweep");
  std::string bench_table;
  bool bench_sweep = false;
  std::vector<double> bench_lengths;
  int bench_threads = 1;
  double bench_power_max = 0.16;
  bench->add_option("--config", common.config_path, "device config file")->required();
  bench->add_option("--table", bench_table, "literature dataset CSV")->required();
  bench->add_option("--out", common.out_dir, "output directory");
  bench->add_flag("--sweep", bench_sweep, "run the length sweep (slow)");
  bench->add_option("--lengths-mm", bench_lengths, "sweep lengths");
  bench->add_option("--threads", bench_threads, "sweep parallelism");
  bench->add_option("--power-max-w", bench_power_max, "efficiency-curve power range");
  bench->callback([&]() {
    guard([&]() {
      return run_bench(common, bench_table, bench_sweep, bench_lengths, bench_threads,
                       bench_power_max);
    });
  });

  // predict -----------------------------------------------------------------
  auto* pred = app.add_subcommand("predict", "Spectrum of a retrieved profile at new conditions");
  ScanFlags pred_scan;
  std::string pred_profile, pred_extra;
  double pred_res = 0.0;
  pred->add_option("--config", common.config_path, "target-conditions config file")->required();
  pred->add_option("--profile", pred_profile, "retrieved profile CSV")->required();
  pred->add_option("--extra-profile", pred_extra, "additional profile (e.g. thermal gradient)");
  pred->add_option("--resolution-nm", pred_res, "Gaussian resolution sigma");
  pred->add_option("--out", common.out_dir, "output directory");
  pred_scan.attach(pred);
  pred->callback([&]() {
    guard([&]() { return run_predict(common, pred_scan, pred_profile, pred_extra, pred_res); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2; --help/--version are 0
  }
  return exit_code;
}
