#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpg/dispersion.hpp"
#include "qpg/units.hpp"

using namespace qpg;

namespace {

const SellmeierModel kModel = SellmeierModel::congruent_lithium_niobate();

ProcessConfig design_config() {
  ProcessConfig c;
  c.finalize();
  return c;
}

}  // namespace

TEST_CASE("refractive index matches direct Sellmeier evaluation") {
  // Independently computed at 550 nm / 200 C (30-digit arithmetic).
  CHECK(refractive_index(kModel, 550.0, 200.0, Axis::ordinary) ==
        doctest::Approx(2.3173149463844958).epsilon(1e-12));
  CHECK(refractive_index(kModel, 550.0, 200.0, Axis::extraordinary) ==
        doctest::Approx(2.2392450079583996).epsilon(1e-12));

  // Direct formula re-evaluation for a different point.
  const double lambda_um = 1.55, t = 80.0;
  const auto& c = kModel.ordinary;
  const double f = (t - 24.5) * (t + 24.5 + 2.0 * 273.16);
  const double n2 = c.A1 + (c.A2 + c.B1 * f) / (lambda_um * lambda_um - std::pow(c.A3 + c.B2 * f, 2)) +
                    c.B3 * f - c.A4 * lambda_um * lambda_um;
  CHECK(refractive_index(kModel, 1550.0, 80.0, Axis::ordinary) ==
        doctest::Approx(std::sqrt(n2)).epsilon(1e-14));
}

TEST_CASE("out-of-validity-range evaluation throws instead of extrapolating") {
  CHECK_THROWS_AS(refractive_index(kModel, 300.0, 20.0, Axis::ordinary), RangeError);
  CHECK_THROWS_AS(refractive_index(kModel, 5000.0, 20.0, Axis::ordinary), RangeError);
  CHECK_THROWS_AS(refractive_index(kModel, 1550.0, 500.0, Axis::ordinary), RangeError);
  CHECK_THROWS_AS(refractive_index(kModel, 1550.0, -20.0, Axis::ordinary), RangeError);
}

TEST_CASE("the shipped design point is phase matched") {
  const ProcessConfig cfg = design_config();
  CHECK(cfg.output_center_nm == doctest::Approx(551.68207739883019).epsilon(1e-12));
  const double db = delta_beta(cfg, kModel, omega_from_nm(cfg.signal_center_nm),
                               omega_from_nm(cfg.pump_center_nm));
  // |delta beta| far below one 2*pi/L unit (88.5 1/m for 71 mm).
  CHECK(std::abs(db) < 20.0);
}

TEST_CASE("group indices reproduce the group-velocity-matched design") {
  const ProcessConfig cfg = design_config();
  // Narrow spans give point derivatives; beta1 = n_g / c (30-digit oracle),
  // with the output's sign folded in.
  const TaylorDispersionModel t = fit_taylor(cfg, kModel, 2e11, 2e11);
  CHECK(t.signal_beta1 * kSpeedOfLight == doctest::Approx(2.26527704).epsilon(2e-5));
  CHECK(t.pump_beta1 * kSpeedOfLight == doctest::Approx(2.26174669).epsilon(2e-5));
  CHECK(-t.output_beta1 * kSpeedOfLight == doctest::Approx(2.55748932).epsilon(2e-5));
  // Group-velocity matching between signal and pump to ~0.2%.
  CHECK(std::abs(t.signal_beta1 - t.pump_beta1) / t.signal_beta1 < 2e-3);
}

TEST_CASE("Taylor fit tracks the Sellmeier mismatch near the design point") {
  const ProcessConfig cfg = design_config();
  const TaylorDispersionModel taylor = fit_taylor(cfg, kModel);
  const double omega_p = omega_from_nm(cfg.pump_center_nm);
  double max_err = 0.0, scale = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double lambda_s = cfg.signal_center_nm - 0.5 + 1.0 * i / 40.0;
    const double omega_s = omega_from_nm(lambda_s);
    const double exact = delta_beta(cfg, kModel, omega_s, omega_p);
    const double approx = delta_beta(cfg, taylor, omega_s, omega_p);
    max_err = std::max(max_err, std::abs(exact - approx));
    scale = std::max(scale, std::abs(exact));
  }
  CHECK(max_err < 0.01 * scale);
}

TEST_CASE("delta_beta_map pairs the grids as an outer product") {
  const ProcessConfig cfg = design_config();
  Eigen::VectorXd sig(3), pump(2);
  sig << omega_from_nm(1550.5), omega_from_nm(1550.0), omega_from_nm(1549.5);
  pump << omega_from_nm(857.0), omega_from_nm(856.0);
  const Eigen::MatrixXd m = delta_beta_map(cfg, kModel, sig, pump);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(m(i, j) == doctest::Approx(delta_beta(cfg, kModel, sig(i), pump(j))).epsilon(1e-14));
    }
  }
}

TEST_CASE("equivalent width deviation is a configured linear map") {
  ProcessConfig cfg = design_config();
  CHECK_THROWS_AS(width_to_delta_beta(0.1, cfg), ConfigError);
  cfg.width_sensitivity = 250.0;  // (1/m) per um
  CHECK(width_to_delta_beta(0.1, cfg) == doctest::Approx(25.0));
  CHECK(delta_beta_to_width(width_to_delta_beta(0.37, cfg), cfg) == doctest::Approx(0.37));
}

TEST_CASE("process config invariants") {
  ProcessConfig cfg;
  cfg.qpm_order = 2;
  CHECK_THROWS_AS(cfg.finalize(), ConfigError);
  cfg = ProcessConfig{};
  cfg.length_mm = 0.0;
  CHECK_THROWS_AS(cfg.finalize(), ConfigError);
  cfg = ProcessConfig{};
  cfg.output_center_nm = 540.0;  // violates energy conservation
  CHECK_THROWS_AS(cfg.finalize(), ConfigError);
}

TEST_CASE("piecewise profile validation") {
  DeltaBetaProfile p = DeltaBetaProfile::uniform(14, 71.0);
  CHECK(p.sections() == 14);
  CHECK(p.length_mm() == doctest::Approx(71.0));
  CHECK_NOTHROW(p.validate());
  p.boundaries_mm(3) = p.boundaries_mm(4);  // not strictly increasing
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
