#include "qpg/inverse.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

namespace qpg {

using nlohmann::json;

void GaConfig::validate() const {
  if (tournament < 2) throw ConfigError("tournament size must be >= 2");
  if (population < tournament) throw ConfigError("population must be >= tournament size");
  if (sections < 1) throw ConfigError("sections must be >= 1");
  if (generations < 1) throw ConfigError("generations must be >= 1");
  if (mutation_scale < 0.0 || delta_beta_bound < 0.0) {
    throw ConfigError("scales must be >= 0");
  }
  if (crossover_rate < 0.0 || crossover_rate > 1.0) {
    throw ConfigError("crossover_rate must be in [0, 1]");
  }
  if (elites < 0 || elites >= population) throw ConfigError("elites must be in [0, population)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

Spectrum ObjectiveContext::simulate(const DeltaBetaProfile& profile,
                                    const Spectrum& measured) const {
  const double lo = measured.axis(0);
  const double hi = measured.axis(measured.size() - 1);
  const double margin = 4.0 * kernel.sigma;
  ScanAxis scan;
  scan.mode = scan_mode;
  scan.center_nm = 0.5 * (lo + hi);
  scan.span_nm = (hi - lo) + 2.0 * margin;
  scan.samples = std::max<int>(401, simulation_oversampling * static_cast<int>(measured.size()));
  Spectrum sim = pm_spectrum(config, model, profile, scan);
  sim = convolve_resolution(sim, kernel);
  return sim.peak_normalized();
}

double objective_mse(const DeltaBetaProfile& profile, const Spectrum& measured,
                     const ObjectiveContext& ctx) {
  return spectrum_mse(ctx.simulate(profile, measured), measured);
}

int tournament_select(const std::vector<Candidate>& population, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(population.size());
  if (n == 0) throw ConfigError("tournament on an empty population");
  if (k < 1 || k > n) throw ConfigError("tournament size must be in [1, population]");
  // Selection sampling: k distinct indices, uniform over subsets, order fixed.
  int best = -1;
  int needed = k;
  for (int i = 0; i < n && needed > 0; ++i) {
    std::uniform_int_distribution<int> d(0, n - i - 1);
    if (d(rng) < needed) {
      if (best < 0 || population[i].mse < population[best].mse) best = i;
      --needed;
    }
  }
  return best;
}

Eigen::VectorXd crossover(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          std::mt19937_64& rng) {
  if (a.size() != b.size()) throw ConfigError("crossover requires equal section counts");
  Eigen::VectorXd child(a.size());
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < a.size(); ++i) child(i) = coin(rng) ? a(i) : b(i);
  return child;
}

Eigen::VectorXd mutate(const Eigen::VectorXd& p, double scale, double bound,
                       std::mt19937_64& rng) {
  if (!(scale > 0.0)) throw ConfigError("mutation scale must be > 0");
  std::normal_distribution<double> noise(0.0, scale);
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out(i) = std::clamp(p(i) + noise(rng), -bound, bound);
  }
  return out;
}

RefineResult local_refine(const Eigen::VectorXd& start,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          int max_iters, double bound, double gradient_step) {
  const Eigen::Index m = start.size();
  RefineResult res;
  res.x = start.cwiseMax(-bound).cwiseMin(bound);
  res.value = objective(res.x);
  res.evaluations = 1;
  if (!std::isfinite(res.value)) throw ConfigError("objective not finite at start point");

  auto gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += gradient_step;
      xm(i) -= gradient_step;
      g(i) = (objective(xp) - objective(xm)) / (2.0 * gradient_step);
      res.evaluations += 2;
    }
    return g;
  };

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd g = gradient(res.x);
  const double grad_tol = 1e-14;

  for (int iter = 0; iter < max_iters; ++iter) {
    if (g.norm() < grad_tol) break;
    Eigen::VectorXd dir = -(h_inv * g);
    if (dir.dot(g) >= 0.0) {
      dir = -g;  // reset on loss of descent direction
      h_inv.setIdentity();
    }

    // Backtracking Armijo line search on the clipped step.
    double step = 1.0;
    double new_value = res.value;
    Eigen::VectorXd x_new = res.x;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd trial = (res.x + step * dir).cwiseMax(-bound).cwiseMin(bound);
      const double f = objective(trial);
      ++res.evaluations;
      if (!std::isfinite(f)) {
        res.line_search_failed = true;
        return res;
      }
      if (f <= res.value + 1e-4 * step * dir.dot(g)) {
        x_new = trial;
        new_value = f;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // converged to line-search resolution

    const Eigen::VectorXd s = x_new - res.x;
    res.x = x_new;
    res.value = new_value;
    if (s.norm() == 0.0) break;

    Eigen::VectorXd g_new = gradient(res.x);
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i_m = Eigen::MatrixXd::Identity(m, m);
      h_inv = (i_m - rho * s * y.transpose()) * h_inv * (i_m - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
    g = g_new;
  }
  return res;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ generation) ^ (index << 1 | 1)));
}

DeltaBetaProfile make_profile(const Eigen::VectorXd& offsets, double length_mm) {
  DeltaBetaProfile p;
  p.boundaries_mm =
      Eigen::VectorXd::LinSpaced(offsets.size() + 1, 0.0, length_mm);
  p.offsets = offsets;
  return p;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

json profile_to_json(const DeltaBetaProfile& p) {
  return json{{"boundaries_mm", std::vector<double>(p.boundaries_mm.begin(), p.boundaries_mm.end())},
              {"offsets_per_m", std::vector<double>(p.offsets.begin(), p.offsets.end())}};
}

DeltaBetaProfile profile_from_json(const json& j) {
  DeltaBetaProfile p;
  const auto b = j.at("boundaries_mm").get<std::vector<double>>();
  const auto o = j.at("offsets_per_m").get<std::vector<double>>();
  p.boundaries_mm = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  p.offsets = Eigen::Map<const Eigen::VectorXd>(o.data(), static_cast<Eigen::Index>(o.size()));
  p.validate();
  return p;
}

json ga_config_to_json(const GaConfig& c) {
  return json{{"population", c.population},
              {"generations", c.generations},
              {"tournament", c.tournament},
              {"sections", c.sections},
              {"mutation_scale", c.mutation_scale},
              {"crossover_rate", c.crossover_rate},
              {"elites", c.elites},
              {"refine_fraction", c.refine_fraction},
              {"refine_all", c.refine_all},
              {"init_refine_iters", c.init_refine_iters},
              {"refine_iters", c.refine_iters},
              {"seed", c.seed},
              {"delta_beta_bound", c.delta_beta_bound},
              {"mse_target", c.mse_target},
              {"threads", c.threads}};
}

GaConfig ga_config_from_json(const json& j) {
  GaConfig c;
  c.population = j.at("population");
  c.generations = j.at("generations");
  c.tournament = j.at("tournament");
  c.sections = j.at("sections");
  c.mutation_scale = j.at("mutation_scale");
  c.crossover_rate = j.at("crossover_rate");
  c.elites = j.at("elites");
  c.refine_fraction = j.at("refine_fraction");
  c.refine_all = j.at("refine_all");
  c.init_refine_iters = j.at("init_refine_iters");
  c.refine_iters = j.at("refine_iters");
  c.seed = j.at("seed");
  c.delta_beta_bound = j.at("delta_beta_bound");
  c.mse_target = j.at("mse_target");
  c.threads = j.at("threads");
  return c;
}

}  // namespace

FitResult run_fit(const Spectrum& measured, const GaConfig& ga_in, const ObjectiveContext& ctx,
                  const std::string& checkpoint_dir, int resume_generation) {
  const auto t_start = std::chrono::steady_clock::now();
  GaConfig ga = ga_in;
  ga.validate();
  measured.validate();

  const double length_mm = ctx.config.length_mm;
  const double bound = ga.delta_beta_bound > 0.0
                           ? ga.delta_beta_bound
                           : 5.0 * 2.0 * kPi / ctx.config.length_m();
  ga.delta_beta_bound = bound;
  const double mut_scale = ga.mutation_scale > 0.0 ? ga.mutation_scale : 0.04 * bound;
  ga.mutation_scale = mut_scale;
  const double grad_step = 1e-3 * 2.0 * bound;

  std::atomic<long> evals{0};
  auto objective = [&](const Eigen::VectorXd& x) {
    evals.fetch_add(1, std::memory_order_relaxed);
    return objective_mse(make_profile(x, length_mm), measured, ctx);
  };
  // local_refine counts its own evaluations; subtract the double count.
  auto refine = [&](const Eigen::VectorXd& x, int iters) {
    RefineResult r = local_refine(x, [&](const Eigen::VectorXd& v) { return objective(v); },
                                  iters, bound, grad_step);
    return r;
  };

  std::vector<Candidate> pop(ga.population);
  FitResult result;
  result.seed = ga.seed;
  result.config = ga;
  int start_generation = 0;

  if (resume_generation >= 0) {
    if (checkpoint_dir.empty()) throw ConfigError("resume requires a checkpoint directory");
    char name[64];
    std::snprintf(name, sizeof(name), "gen_%04d.json", resume_generation);
    std::ifstream f(std::filesystem::path(checkpoint_dir) / name);
    if (!f) throw ConfigError("checkpoint for generation " + std::to_string(resume_generation) +
                              " not found");
    json j = json::parse(f);
    const auto& jp = j.at("population");
    if (static_cast<int>(jp.size()) != ga.population) {
      throw ConfigError("checkpoint population size mismatch");
    }
    for (int i = 0; i < ga.population; ++i) {
      const auto o = jp[i].at("offsets").get<std::vector<double>>();
      pop[i].offsets =
          Eigen::Map<const Eigen::VectorXd>(o.data(), static_cast<Eigen::Index>(o.size()));
      pop[i].mse = jp[i].at("mse");
    }
    result.best_trace = j.at("best_trace").get<std::vector<double>>();
    result.median_trace = j.at("median_trace").get<std::vector<double>>();
    evals.store(j.at("evaluations").get<long>());
    start_generation = resume_generation + 1;
  } else {
    // Initial population: uniform in the box, each candidate refined.
    parallel_for(ga.population, ga.threads, [&](int i) {
      auto rng = substream(ga.seed, 0, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> u(-bound, bound);
      Eigen::VectorXd x(ga.sections);
      for (int s = 0; s < ga.sections; ++s) x(s) = u(rng);
      RefineResult r = refine(x, ga.init_refine_iters);
      pop[i] = {r.x, r.value};
    });
  }

  auto by_mse = [](const Candidate& a, const Candidate& b) { return a.mse < b.mse; };

  auto record_generation = [&](int gen) {
    std::vector<double> mses(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) mses[i] = pop[i].mse;
    std::sort(mses.begin(), mses.end());
    double best = mses.front();
    if (!result.best_trace.empty()) best = std::min(best, result.best_trace.back());
    result.best_trace.push_back(best);
    result.median_trace.push_back(mses[mses.size() / 2]);
    if (!checkpoint_dir.empty()) {
      std::filesystem::create_directories(checkpoint_dir);
      json jp = json::array();
      for (const auto& c : pop) {
        jp.push_back({{"offsets", std::vector<double>(c.offsets.begin(), c.offsets.end())},
                      {"mse", c.mse}});
      }
      json j{{"generation", gen},
             {"population", std::move(jp)},
             {"best_trace", result.best_trace},
             {"median_trace", result.median_trace},
             {"evaluations", evals.load()}};
      char name[64];
      std::snprintf(name, sizeof(name), "gen_%04d.json", gen);
      std::ofstream f(std::filesystem::path(checkpoint_dir) / name);
      f << j.dump(2) << "\n";
    }
  };

  if (start_generation == 0) {
    std::sort(pop.begin(), pop.end(), by_mse);
    record_generation(0);
    start_generation = 1;
  }

  for (int gen = start_generation; gen <= ga.generations; ++gen) {
    if (ga.mse_target > 0.0 && result.best_trace.back() <= ga.mse_target) break;

    // Elites carry over unchanged; the rest are bred. Each child owns an RNG
    // substream keyed on (seed, gen, index) so breeding is order-independent.
    std::vector<Candidate> next(ga.population);
    for (int i = 0; i < ga.elites; ++i) next[i] = pop[i];
    parallel_for(ga.population - ga.elites, ga.threads, [&](int k) {
      const int i = ga.elites + k;
      auto rng = substream(ga.seed, static_cast<std::uint64_t>(gen), static_cast<std::uint64_t>(i));
      const int pa = tournament_select(pop, ga.tournament, rng);
      const int pb = tournament_select(pop, ga.tournament, rng);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      Eigen::VectorXd child = u01(rng) < ga.crossover_rate
                                  ? crossover(pop[pa].offsets, pop[pb].offsets, rng)
                                  : pop[pa].offsets;
      child = mutate(child, mut_scale, bound, rng);
      next[i] = {child, objective(child)};
    });

    std::sort(next.begin(), next.end(), by_mse);

    const int refine_count =
        ga.refine_all ? ga.population
                      : std::max(1, static_cast<int>(std::lround(ga.refine_fraction *
                                                                 ga.population)));
    parallel_for(refine_count, ga.threads, [&](int i) {
      RefineResult r = refine(next[i].offsets, ga.refine_iters);
      if (r.value < next[i].mse) next[i] = {r.x, r.value};
    });
    std::sort(next.begin(), next.end(), by_mse);
    pop = std::move(next);
    record_generation(gen);
  }

  result.best_profile = make_profile(pop.front().offsets, length_mm);
  result.best_mse = objective_mse(result.best_profile, measured, ctx);
  result.evaluations = evals.load();
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

DeltaBetaProfile combine_profiles(const DeltaBetaProfile& a, const DeltaBetaProfile& b) {
  a.validate();
  b.validate();
  if (std::abs(a.length_mm() - b.length_mm()) > 1e-9 * a.length_mm()) {
    throw ConfigError("combine_profiles requires equal lengths");
  }
  std::vector<double> bounds(a.boundaries_mm.begin(), a.boundaries_mm.end());
  bounds.insert(bounds.end(), b.boundaries_mm.begin(), b.boundaries_mm.end());
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               bounds.end());

  auto value_at = [](const DeltaBetaProfile& p, double z) {
    for (int j = 0; j < p.sections(); ++j) {
      if (z < p.boundaries_mm(j + 1)) return p.offsets(j);
    }
    return p.offsets(p.sections() - 1);
  };

  DeltaBetaProfile out;
  out.boundaries_mm =
      Eigen::Map<const Eigen::VectorXd>(bounds.data(), static_cast<Eigen::Index>(bounds.size()));
  out.offsets.resize(out.boundaries_mm.size() - 1);
  for (Eigen::Index j = 0; j + 1 < out.boundaries_mm.size(); ++j) {
    const double mid = 0.5 * (out.boundaries_mm(j) + out.boundaries_mm(j + 1));
    out.offsets(j) = value_at(a, mid) + value_at(b, mid);
  }
  return out;
}

Spectrum predict_at_conditions(const DeltaBetaProfile& profile, const ProcessConfig& to,
                               const DispersionModel& model, const ScanAxis& scan,
                               const std::optional<DeltaBetaProfile>& extra) {
  const DeltaBetaProfile effective = extra ? combine_profiles(profile, *extra) : profile;
  return pm_spectrum(to, model, effective, scan);
}

std::string fit_result_to_json(const FitResult& r, bool include_timing) {
  json j{{"best_profile", profile_to_json(r.best_profile)},
         {"best_mse", r.best_mse},
         {"best_trace", r.best_trace},
         {"median_trace", r.median_trace},
         {"evaluations", r.evaluations},
         {"seed", r.seed},
         {"config", ga_config_to_json(r.config)}};
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  json j = json::parse(text);
  FitResult r;
  r.best_profile = profile_from_json(j.at("best_profile"));
  r.best_mse = j.at("best_mse");
  r.best_trace = j.at("best_trace").get<std::vector<double>>();
  r.median_trace = j.at("median_trace").get<std::vector<double>>();
  r.evaluations = j.at("evaluations");
  r.seed = j.at("seed");
  r.config = ga_config_from_json(j.at("config"));
  return r;
}

}  // namespace qpg
