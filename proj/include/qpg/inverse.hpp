#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpg/phasematch.hpp"
#include "qpg/spectrum.hpp"

namespace qpg {

struct GaConfig {
  int population = 100;
  int generations = 100;
  int tournament = 4;
  int sections = 14;
  double mutation_scale = 0.0;    // 1/m; 0 = 2% of the box width
  double crossover_rate = 0.9;    // probability a child is a crossover (else a copy)
  int elites = 2;
  double refine_fraction = 0.1;   // top share refined each generation
  bool refine_all = false;        // refine every candidate every generation
  int init_refine_iters = 30;
  int refine_iters = 15;
  std::uint64_t seed = 1;
  double delta_beta_bound = 0.0;  // box |f_j| <= bound; 0 = 5 * 2*pi / L
  double mse_target = 0.0;        // stop early when best MSE <= target (0 = off)
  int threads = 1;                // parallel objective evaluation

  void validate() const;
};

/// Everything the spectrum-MSE objective needs besides the profile.
struct ObjectiveContext {
  ProcessConfig config;
  DispersionModel model;
  ResolutionKernel kernel;          // in scan-axis units
  ScanMode scan_mode = ScanMode::signal_fixed_pump;
  int simulation_oversampling = 2;  // sim samples per measurement sample

  /// Simulated, convolved, peak-normalized spectrum for a profile, on a
  /// uniform axis covering the measurement range (+ kernel margin).
  Spectrum simulate(const DeltaBetaProfile& profile, const Spectrum& measured) const;
};

/// Mean over measurement samples of (sim_norm - meas_norm)^2.
double objective_mse(const DeltaBetaProfile& profile, const Spectrum& measured,
                     const ObjectiveContext& ctx);

struct Candidate {
  Eigen::VectorXd offsets;
  double mse = 0.0;
};

/// Draws k distinct candidates uniformly and returns the index of the best.
int tournament_select(const std::vector<Candidate>& population, int k, std::mt19937_64& rng);

/// Uniform per-section crossover, each child section from a or b with p = 1/2.
Eigen::VectorXd crossover(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          std::mt19937_64& rng);

/// Adds iid zero-mean Gaussian noise of std `scale`, clipped to [-bound, bound].
Eigen::VectorXd mutate(const Eigen::VectorXd& p, double scale, double bound,
                       std::mt19937_64& rng);

struct RefineResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool line_search_failed = false;  // returned best iterate so far
};

/// BFGS with central-difference gradients and backtracking line search,
/// iterates clipped to the box. Never returns a value above the start.
RefineResult local_refine(const Eigen::VectorXd& start,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          int max_iters, double bound, double gradient_step);

struct FitResult {
  DeltaBetaProfile best_profile;
  double best_mse = 0.0;
  std::vector<double> best_trace;    // per generation, non-increasing
  std::vector<double> median_trace;  // per generation
  long evaluations = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;  // excluded from the deterministic JSON
  GaConfig config;
};

/// GA with per-candidate BFGS refinement. Deterministic for a given seed:
/// all randomness comes from substreams keyed on (seed, generation, index),
/// so parallel objective evaluation cannot reorder it.
FitResult run_fit(const Spectrum& measured, const GaConfig& ga, const ObjectiveContext& ctx,
                  const std::string& checkpoint_dir = "", int resume_generation = -1);

/// Re-predicts the spectrum under changed operating conditions: fabrication
/// offsets stay fixed, the dispersion model supplies Delta-beta at `to`, and
/// an optional extra profile (e.g. an oven gradient) adds on top.
Spectrum predict_at_conditions(const DeltaBetaProfile& profile, const ProcessConfig& to,
                               const DispersionModel& model, const ScanAxis& scan,
                               const std::optional<DeltaBetaProfile>& extra = {});

/// Sums two piecewise-constant profiles on the merged boundary set.
DeltaBetaProfile combine_profiles(const DeltaBetaProfile& a, const DeltaBetaProfile& b);

/// FitResult JSON (profile, traces, config echo, seed); timing is only
/// included on request so identical seeds yield identical bytes.
std::string fit_result_to_json(const FitResult& r, bool include_timing = false);
FitResult fit_result_from_json(const std::string& text);

}  // namespace qpg
