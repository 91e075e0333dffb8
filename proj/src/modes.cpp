#include "qpg/modes.hpp"

#include <cmath>

#include "qpg/phasematch.hpp"

namespace qpg {

double hermite(int n, double x) {
  if (n < 0) throw ConfigError("Hermite order must be >= 0");
  double hkm1 = 1.0, hk = 2.0 * x;
  if (n == 0) return hkm1;
  for (int k = 1; k < n; ++k) {
    const double hkp1 = 2.0 * x * hk - 2.0 * k * hkm1;
    hkm1 = hk;
    hk = hkp1;
  }
  return hk;
}

double hg_one_over_e_scale(int order) {
  if (order == 0) return 1.0;
  auto intensity = [order](double x) {
    const double a = hermite(order, x) * std::exp(-0.5 * x * x);
    return a * a;
  };
  // Peak and outer 1/e crossing by scan + bisection; the envelope decays
  // monotonically beyond its outermost extremum.
  double peak = 0.0;
  const double xmax = 2.0 * std::sqrt(2.0 * order + 1.0) + 4.0;
  for (double x = 0.0; x <= xmax; x += 1e-3) peak = std::max(peak, intensity(x));
  const double level = peak / std::exp(1.0);
  double lo = 0.0, hi = xmax;
  for (double x = xmax; x >= 0.0; x -= 1e-3) {
    if (intensity(x) >= level) {
      lo = x;
      hi = x + 1e-3;
      break;
    }
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (intensity(mid) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& axis) {
  const Eigen::Index n = axis.size();
  Eigen::VectorXd w(n);
  if (n == 1) {
    w(0) = 1.0;
    return w;
  }
  w(0) = 0.5 * (axis(1) - axis(0));
  w(n - 1) = 0.5 * (axis(n - 1) - axis(n - 2));
  for (Eigen::Index i = 1; i + 1 < n; ++i) w(i) = 0.5 * (axis(i + 1) - axis(i - 1));
  return w;
}

// sqrt(integral of |H_n(x) exp(-x^2/2)|^2 dx) = sqrt(sqrt(pi) 2^n n!)
double hg_l2_norm(int n) {
  double f = std::sqrt(kPi);
  for (int k = 1; k <= n; ++k) f *= 2.0 * k;
  return std::sqrt(f);
}

}  // namespace

Eigen::VectorXcd pump_envelope(const PumpEnvelope& pump, const Eigen::VectorXd& omega_axis) {
  if (pump.order < 0) throw ConfigError("pump order must be >= 0");
  if (!(pump.sigma > 0.0)) throw ConfigError("pump sigma must be > 0");
  const double wc = pump.center_omega();
  if (omega_axis(0) > wc - 5.0 * pump.sigma ||
      omega_axis(omega_axis.size() - 1) < wc + 5.0 * pump.sigma) {
    throw ConfigError("pump axis does not span +-5 sigma; cannot normalize envelope");
  }
  Eigen::VectorXcd alpha(omega_axis.size());
  for (Eigen::Index i = 0; i < omega_axis.size(); ++i) {
    const double d = omega_axis(i) - wc;
    const double x = d / pump.sigma;
    const double real_env = hermite(pump.order, x) * std::exp(-0.5 * x * x);
    alpha(i) = pump.chirp == 0.0
                   ? std::complex<double>(real_env, 0.0)
                   : std::polar(real_env, 0.5 * pump.chirp * d * d);
  }
  const Eigen::VectorXd w = trapezoid_weights(omega_axis);
  const double norm2 = (alpha.array().abs2() * w.array()).sum();
  return alpha / std::sqrt(norm2);
}

double pm_one_over_e_width(const ProcessConfig& config, const DispersionModel& model) {
  // 1/e intensity half-width of the uniform sinc^2 in omega_o at fixed signal.
  const double ws = omega_from_nm(config.signal_center_nm);
  const double wp = omega_from_nm(config.pump_center_nm);
  const double h = 1e9;
  const double slope =
      (delta_beta(config, model, ws, wp + h) - delta_beta(config, model, ws, wp - h)) / (2 * h);
  constexpr double kSincSqOneOverE = 1.6442727294778682;  // sinc^2(x) = 1/e
  return 2.0 * kSincSqOneOverE / (config.length_m() * std::abs(slope));
}

JsaGrid build_jsa(const ProcessConfig& config, const DispersionModel& model,
                  const std::optional<DeltaBetaProfile>& profile, const PumpEnvelope& pump,
                  const JsaGridSpec& spec) {
  const double ws0 = omega_from_nm(config.signal_center_nm);
  const double wo0 = ws0 + omega_from_nm(config.pump_center_nm);
  const double wp0 = pump.center_omega();

  const double pump_half = spec.pump_sigma_span * pump.sigma;
  const double pm_half = spec.pm_width_span * pm_one_over_e_width(config, model);
  const double out_half = std::max(pump_half, pm_half);

  JsaGrid j;
  j.temperature_c = config.temperature_c;
  j.signal_axis =
      Eigen::VectorXd::LinSpaced(spec.signal_samples, ws0 - pump_half, ws0 + pump_half);
  j.output_axis =
      Eigen::VectorXd::LinSpaced(spec.output_samples, wo0 - out_half, wo0 + out_half);
  j.amplitude.resize(spec.signal_samples, spec.output_samples);

  const double norm = 1.0 / (hg_l2_norm(pump.order) * std::sqrt(pump.sigma));
  const double length_m = config.length_m();
  for (Eigen::Index jo = 0; jo < j.output_axis.size(); ++jo) {
    for (Eigen::Index is = 0; is < j.signal_axis.size(); ++is) {
      const double w_s = j.signal_axis(is);
      const double w_p = j.output_axis(jo) - w_s;
      const double d = w_p - wp0;
      if (std::abs(d) > 8.0 * pump.sigma + 1e-6 * pump.sigma) {
        j.amplitude(is, jo) = 0.0;  // outside pump support; envelope is ~e^-32
        continue;
      }
      const double db = delta_beta(config, model, w_s, w_p);
      const std::complex<double> phi =
          profile ? pm_profile(*profile, db) : pm_uniform(db, length_m);
      const double x = d / pump.sigma;
      const double env = hermite(pump.order, x) * std::exp(-0.5 * x * x) * norm;
      std::complex<double> alpha(env, 0.0);
      if (pump.chirp != 0.0) alpha = std::polar(env, 0.5 * pump.chirp * d * d);
      j.amplitude(is, jo) = phi * alpha;
    }
  }
  return j;
}

SchmidtDecomposition schmidt_decompose(const JsaGrid& jsa) {
  if (jsa.amplitude.size() == 0 || jsa.amplitude.cwiseAbs().maxCoeff() == 0.0) {
    throw ConfigError("schmidt_decompose on an all-zero JSA");
  }
  const Eigen::VectorXd ws = trapezoid_weights(jsa.signal_axis).cwiseSqrt();
  const Eigen::VectorXd wo = trapezoid_weights(jsa.output_axis).cwiseSqrt();
  Eigen::MatrixXcd weighted = ws.asDiagonal() * jsa.amplitude * wo.asDiagonal();

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(weighted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition d;
  const Eigen::VectorXd& sv = svd.singularValues();
  d.amplitude_norm = sv.norm();
  d.coefficients = sv.array().square() / sv.squaredNorm();
  d.signal_modes = ws.cwiseInverse().asDiagonal() * svd.matrixU();
  d.output_modes = wo.cwiseInverse().asDiagonal() * svd.matrixV();
  d.signal_axis = jsa.signal_axis;
  d.output_axis = jsa.output_axis;
  return d;
}

double selectivity(const SchmidtDecomposition& d, int mode) {
  if (mode < 0 || mode >= d.coefficients.size()) throw ConfigError("mode index out of range");
  const double rho = d.coefficients(mode);
  return rho * rho;
}

double extinction_ratio_db(double p1, double p0) {
  if (!(p0 > 0.0)) throw ConfigError("extinction ratio requires P0 > 0");
  return -10.0 * std::log10(p1 / p0);
}

double extinction_from_selectivity_db(double s) {
  if (!(s > 0.0)) throw ConfigError("selectivity must be > 0");
  return -10.0 * std::log10(std::sqrt(s));
}

double bandwidth_compression(double input_bandwidth_ghz, double output_bandwidth_ghz) {
  if (!(input_bandwidth_ghz > 0.0 && output_bandwidth_ghz > 0.0)) {
    throw ConfigError("bandwidth compression requires positive bandwidths");
  }
  return input_bandwidth_ghz / output_bandwidth_ghz;
}

double mode_projection_power(const ProcessConfig& config, const DispersionModel& model,
                             const std::optional<DeltaBetaProfile>& profile,
                             const ProjectionConfig& proj, int pump_order) {
  const double sigma_s = proj.signal_sigma > 0.0 ? proj.signal_sigma : proj.pump.sigma;
  double sigma_p = proj.pump.sigma;
  if (proj.equal_intensity_bandwidth) sigma_p /= hg_one_over_e_scale(pump_order);

  const double ws0 = omega_from_nm(config.signal_center_nm);
  const double wo0 = ws0 + omega_from_nm(config.pump_center_nm);
  const double wp0 = omega_from_nm(proj.pump.center_nm);
  const double pm_width = pm_one_over_e_width(config, model);
  const double length_m = config.length_m();

  const Eigen::Index ns = proj.signal_samples;
  Eigen::VectorXd sig_axis =
      Eigen::VectorXd::LinSpaced(ns, ws0 - 6.0 * sigma_s, ws0 + 6.0 * sigma_s);
  const double dws = sig_axis(1) - sig_axis(0);

  // Fixed order-0 signal mode, L2-normalized on its grid.
  Eigen::VectorXd psi(ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    const double x = (sig_axis(i) - ws0) / sigma_s;
    psi(i) = std::exp(-0.5 * x * x);
  }
  psi /= std::sqrt(psi.squaredNorm() * dws);

  const double out_half = 6.0 * std::sqrt(sigma_s * sigma_s + sigma_p * sigma_p) + 10.0 * pm_width;
  Eigen::Index no = proj.output_samples;
  // Resolve the phase-matching ridge with at least ~8 samples.
  const Eigen::Index needed = static_cast<Eigen::Index>(std::ceil(16.0 * out_half / pm_width)) | 1;
  no = std::min<Eigen::Index>(std::max(no, needed), 40001);

  const double pump_norm = 1.0 / (hg_l2_norm(pump_order) * std::sqrt(sigma_p));
  double total = 0.0;
  const double dwo = 2.0 * out_half / static_cast<double>(no - 1);
  for (Eigen::Index jo = 0; jo < no; ++jo) {
    const double w_o = wo0 - out_half + dwo * static_cast<double>(jo);
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index is = 0; is < ns; ++is) {
      const double w_s = sig_axis(is);
      const double d = (w_o - w_s) - wp0;
      const double x = d / sigma_p;
      if (std::abs(x) > 8.5) continue;
      const double env = hermite(pump_order, x) * std::exp(-0.5 * x * x) * pump_norm;
      const double db = delta_beta(config, model, w_s, w_o - w_s);
      const std::complex<double> phi =
          profile ? pm_profile(*profile, db) : pm_uniform(db, length_m);
      acc += phi * env * psi(is);
    }
    total += std::norm(acc) * dws * dws * dwo;
  }
  return total;
}

}  // namespace qpg
