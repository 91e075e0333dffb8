#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "qpg/phasematch.hpp"
#include "qpg/units.hpp"

using namespace qpg;

namespace {

// Brute-force quadrature oracle: (1/L) int_0^L exp(i int_0^z db) dz on a
// midpoint rule with steps aligned to section boundaries, independent of the
// closed-form section evaluation. O(dz^2) accurate.
std::complex<double> pm_quadrature(const DeltaBetaProfile& profile, double db_global, int steps) {
  const double length_m = profile.length_mm() * 1e-3;
  std::complex<double> acc(0.0, 0.0);
  double phase = 0.0;
  for (int j = 0; j < profile.sections(); ++j) {
    const double seg_m = (profile.boundaries_mm(j + 1) - profile.boundaries_mm(j)) * 1e-3;
    const double db = db_global + profile.offsets(j);
    const int n = std::max(1, static_cast<int>(std::lround(steps * seg_m / length_m)));
    const double dz = seg_m / n;
    for (int i = 0; i < n; ++i) {
      acc += std::polar(dz, phase + db * (i + 0.5) * dz);
    }
    phase += db * seg_m;
  }
  return acc / length_m;
}

DeltaBetaProfile random_profile(std::mt19937_64& rng, int sections, double length_mm,
                                double bound) {
  DeltaBetaProfile p = DeltaBetaProfile::uniform(sections, length_mm);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (int i = 0; i < sections; ++i) p.offsets(i) = u(rng);
  return p;
}

const SellmeierModel kModel = SellmeierModel::congruent_lithium_niobate();

}  // namespace

TEST_CASE("uniform limit equals the analytic sinc form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> udb(-4000.0, 4000.0), ul(0.001, 0.1);
  for (int i = 0; i < 200; ++i) {
    const double db = udb(rng), length_m = ul(rng);
    const auto direct = pm_uniform(db, length_m);
    const auto expected = std::polar(1.0, db * length_m / 2.0) * sinc(db * length_m / 2.0);
    CHECK(std::abs(direct - expected) < 1e-12);
    // Zero-offset profile reduces to the same closed form.
    const DeltaBetaProfile flat = DeltaBetaProfile::uniform(1 + i % 14, length_m * 1e3);
    CHECK(std::abs(pm_profile(flat, db) - direct) < 1e-12);
  }
}

TEST_CASE("piecewise closed form matches brute-force quadrature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> udb(-300.0, 300.0);
  for (int i = 0; i < 10; ++i) {
    const DeltaBetaProfile p = random_profile(rng, 14, 71.0, 500.0);
    const double db = udb(rng);
    const auto oracle = pm_quadrature(p, db, 200000);
    const auto fast = pm_profile(p, db);
    CHECK(std::abs(fast - oracle) < 1e-6);
  }
}

TEST_CASE("phase-matching amplitude is bounded by 1") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> udb(-5000.0, 5000.0);
  for (int i = 0; i < 300; ++i) {
    const DeltaBetaProfile p = random_profile(rng, 1 + i % 20, 71.0, 2000.0);
    CHECK(std::abs(pm_profile(p, udb(rng))) <= 1.0 + 1e-12);
  }
}

TEST_CASE("spatially reversed profiles give identical intensity") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const DeltaBetaProfile p = random_profile(rng, 14, 71.0, 500.0);
    DeltaBetaProfile rev = p;
    rev.offsets = p.offsets.reverse();
    // Equal sections, so reversing offsets reverses the device.
    std::uniform_real_distribution<double> udb(-300.0, 300.0);
    const double db = udb(rng);
    CHECK(std::abs(std::abs(pm_profile(p, db)) - std::abs(pm_profile(rev, db))) < 1e-10);
  }
}

TEST_CASE("splitting sections leaves the amplitude unchanged") {
  std::mt19937_64 rng(19);
  const DeltaBetaProfile p = random_profile(rng, 7, 71.0, 500.0);
  // Refine: split every section in two with the same offset value.
  DeltaBetaProfile fine;
  fine.boundaries_mm.resize(2 * p.sections() + 1);
  fine.offsets.resize(2 * p.sections());
  for (int j = 0; j < p.sections(); ++j) {
    fine.boundaries_mm(2 * j) = p.boundaries_mm(j);
    fine.boundaries_mm(2 * j + 1) = 0.5 * (p.boundaries_mm(j) + p.boundaries_mm(j + 1));
    fine.offsets(2 * j) = p.offsets(j);
    fine.offsets(2 * j + 1) = p.offsets(j);
  }
  fine.boundaries_mm(2 * p.sections()) = p.boundaries_mm(p.sections());
  for (double db : {-250.0, -30.0, 0.0, 42.0, 199.0}) {
    CHECK(std::abs(pm_profile(p, db) - pm_profile(fine, db)) < 1e-12);
  }
}

TEST_CASE("ideal 71 mm output-scan spectrum has the design bandwidth") {
  ProcessConfig cfg;
  cfg.finalize();
  ScanAxis scan;
  scan.mode = ScanMode::output_fixed_signal;
  scan.span_nm = 0.12;
  scan.samples = 4001;
  const Spectrum s = pm_spectrum(cfg, kModel, std::nullopt, scan);
  CHECK(s.intensity.maxCoeff() == doctest::Approx(1.0));
  // Pinned by the independent width computation: 1/e half-width 0.00759 nm.
  CHECK(bandwidth(s, BandwidthMetric::one_over_e) == doctest::Approx(0.00759).epsilon(0.01));
  // FWHM / one_over_e ratio of sinc^2 (oracle constants).
  CHECK(bandwidth(s, BandwidthMetric::fwhm) / bandwidth(s, BandwidthMetric::one_over_e) ==
        doctest::Approx(2.0 * 1.39155737825151 / 1.6442727294778682).epsilon(1e-3));
}

TEST_CASE("side lobes of the uniform device match the sinc oracle") {
  ProcessConfig cfg;
  cfg.finalize();
  ScanAxis scan;
  scan.mode = ScanMode::output_fixed_signal;
  scan.span_nm = 0.12;
  scan.samples = 8001;
  const Spectrum s = pm_spectrum(cfg, kModel, std::nullopt, scan);
  // First side-lobe height of sinc^2: 0.047190449225811 (30-digit oracle).
  double side = 0.0;
  bool in_side = false;
  Eigen::Index peak;
  s.intensity.maxCoeff(&peak);
  for (Eigen::Index i = peak; i < s.size(); ++i) {
    if (!in_side && s.intensity(i) < 0.01) in_side = true;
    if (in_side) {
      if (s.intensity(i) > side) side = s.intensity(i);
      if (side > 0.04 && s.intensity(i) < 0.01) break;
    }
  }
  CHECK(side == doctest::Approx(0.047190449225811).epsilon(0.01));
}

TEST_CASE("a linear delta-beta gradient broadens and distorts the spectrum") {
  ProcessConfig cfg;
  cfg.finalize();
  DeltaBetaProfile ramp = DeltaBetaProfile::uniform(14, cfg.length_mm);
  for (int j = 0; j < 14; ++j) {
    ramp.offsets(j) = 600.0 * (j / 13.0 - 0.5);  // ~7 x (2 pi / L) tilt overall
  }
  ScanAxis scan;
  scan.mode = ScanMode::output_fixed_signal;
  scan.span_nm = 0.3;
  scan.samples = 6001;
  const Spectrum ideal = pm_spectrum(cfg, kModel, std::nullopt, scan);
  const Spectrum distorted = pm_spectrum(cfg, kModel, ramp, scan);
  CHECK(bandwidth(distorted, BandwidthMetric::one_over_e) >
        1.5 * bandwidth(ideal, BandwidthMetric::one_over_e));
}

TEST_CASE("profile length must match the device length") {
  ProcessConfig cfg;
  cfg.finalize();
  const DeltaBetaProfile wrong = DeltaBetaProfile::uniform(5, 60.0);
  ScanAxis scan;
  CHECK_THROWS_AS(pm_spectrum(cfg, kModel, wrong, scan), ConfigError);
}
