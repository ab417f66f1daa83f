#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lpreg/experiments.hpp"

using namespace lpreg;
using Catch::Approx;

namespace {

Eigen::VectorXd x1(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

bool curves_equal(const RiskCurve& a, const RiskCurve& b) {
  if (a.grid_values != b.grid_values || a.series.size() != b.series.size()) return false;
  for (std::size_t s = 0; s < a.series.size(); ++s) {
    if (a.series[s].name != b.series[s].name) return false;
    if (a.series[s].points.size() != b.series[s].points.size()) return false;
    for (std::size_t i = 0; i < a.series[s].points.size(); ++i) {
      const auto& p = a.series[s].points[i];
      const auto& q = b.series[s].points[i];
      const bool mean_same =
          (std::isnan(p.mean) && std::isnan(q.mean)) || p.mean == q.mean;
      const bool se_same =
          (std::isnan(p.std_error) && std::isnan(q.std_error)) || p.std_error == q.std_error;
      if (!mean_same || !se_same || p.replicas != q.replicas || p.retries != q.retries)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("reference_tau_cv is deterministic and positive") {
  SweepConfig cfg;
  cfg.n = 120;
  cfg.noise = NoiseSpec::gaussian(0.5);
  cfg.seed = 9001;
  const double a = reference_tau_cv(cfg);
  const double b = reference_tau_cv(cfg);
  CHECK(a == b);
  CHECK(a > 0.0);
}

TEST_CASE("mc_pointwise_risk vanishes for a noiseless zero function") {
  SweepConfig cfg;
  cfg.n = 25;
  cfg.f = RegressionFunction::constant(0.0);
  cfg.noise = NoiseSpec::none();
  cfg.tau = 0.2;
  CHECK(mc_pointwise_risk(cfg, "gnw", x1(0.5), 50, 3).mean == 0.0);
  CHECK(mc_pointwise_risk(cfg, "nw", x1(0.5), 50, 3).mean == 0.0);
}

TEST_CASE("mc_pointwise_risk matches the complete-graph noise floor") {
  // box profile with h_g beyond the support diameter: the graph is complete,
  // GNW averages all n labels, and the risk is exactly sigma^2 / n.
  SweepConfig cfg;
  cfg.n = 20;
  cfg.link_profile = KernelProfile::box;
  cfg.h_g = 1.5;
  cfg.f = RegressionFunction::constant(3.0);
  cfg.noise = NoiseSpec::gaussian(0.25);
  cfg.tau = 0.2;
  const auto e = mc_pointwise_risk(cfg, "gnw", x1(0.5), 4000, 11);
  CHECK(e.replicas == 4000);
  CHECK(std::abs(e.mean - 0.25 / 20.0) <= 3.0 * e.std_error);
}

TEST_CASE("mc_pointwise_risk argument validation") {
  SweepConfig cfg;
  cfg.n = 10;
  cfg.tau = 0.2;
  CHECK_THROWS_AS(mc_pointwise_risk(cfg, "gnw", x1(0.5), 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(mc_pointwise_risk(cfg, "mystery", x1(0.5), 10, 3), std::invalid_argument);
}

TEST_CASE("mc_pointwise_risk is reproducible") {
  SweepConfig cfg;
  cfg.n = 30;
  cfg.h_g = 0.5;
  cfg.noise = NoiseSpec::gaussian(0.5);
  const auto a = mc_pointwise_risk(cfg, "enw-sp", x1(0.4), 25, 77);
  const auto b = mc_pointwise_risk(cfg, "enw-sp", x1(0.4), 25, 77);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean >= 0.0);
  CHECK(std::isfinite(a.mean));
}

TEST_CASE("mc_global_risk") {
  SweepConfig cfg;
  cfg.n = 25;
  cfg.f = RegressionFunction::constant(0.0);
  cfg.tau = 0.2;
  CHECK(mc_global_risk(cfg, "gnw", 50, 3).mean == 0.0);
  CHECK_THROWS_AS(mc_global_risk(cfg, "gnw", 1, 3), std::invalid_argument);

  // complete-graph noise floor again, now with positions redrawn per replica
  SweepConfig noisy;
  noisy.n = 20;
  noisy.link_profile = KernelProfile::box;
  noisy.h_g = 1.5;
  noisy.f = RegressionFunction::constant(3.0);
  noisy.noise = NoiseSpec::gaussian(0.25);
  noisy.tau = 0.2;
  const auto e = mc_global_risk(noisy, "gnw", 4000, 19);
  CHECK(std::abs(e.mean - 0.25 / 20.0) <= 3.0 * e.std_error);
}

TEST_CASE("run_perturbed_nw_experiment") {
  SweepConfig cfg;
  cfg.n = 60;
  cfg.num_mc = 3;
  cfg.num_pts = 6;
  cfg.noise = NoiseSpec::gaussian(0.5);
  cfg.seed = 404;
  const auto curve = run_perturbed_nw_experiment(cfg, {0.0, 1.0, 0.5});
  REQUIRE(curve.series.size() == 3);
  CHECK(curve.series[0].name == "nw-delta-0x");
  CHECK(curve.series[1].name == "nw-delta-1x");
  CHECK(curve.series[2].name == "nw-delta-" + std::to_string(0.5));
  CHECK(curve.grid_values.size() == 6);
  CHECK(curve.tau_cv > 0.0);
  for (const auto& s : curve.series)
    for (const auto& p : s.points) {
      CHECK(p.replicas == 3);
      CHECK(p.mean >= 0.0);
      CHECK(std::isfinite(p.mean));
    }
  const auto again = run_perturbed_nw_experiment(cfg, {0.0, 1.0, 0.5});
  CHECK(curves_equal(curve, again));

  SweepConfig bad = cfg;
  bad.density = DensitySpec::uniform_box({{0.0, 1.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(run_perturbed_nw_experiment(bad, {0.0}), std::invalid_argument);
}

TEST_CASE("run_recovery_error_curve") {
  SweepConfig cfg;
  cfg.n = 40;
  cfg.num_mc = 2;
  cfg.max_retries = 2;
  cfg.seed = 512;
  const auto curve = run_recovery_error_curve(cfg, {0.2, 0.5});
  REQUIRE(curve.series.size() == 2);
  CHECK(curve.series[0].name == "sp");
  CHECK(curve.series[1].name == "spectral");
  REQUIRE(curve.grid_values == std::vector<double>{0.2, 0.5});
  for (const auto& p : curve.series[0].points) {
    CHECK(p.replicas == 2);  // raw graphs connect at these scales
    CHECK(p.mean >= 0.0);
    CHECK(std::isfinite(p.mean));
  }
  for (const auto& p : curve.series[1].points) {
    // the thresholded graph may or may not connect at n = 40; missing points
    // must be marked consistently
    if (p.replicas == 0) {
      CHECK(p.missing());
      CHECK(std::isnan(p.mean));
      CHECK(p.retries > 0);
    } else {
      CHECK(p.mean >= 0.0);
    }
  }
  CHECK_THROWS_AS(run_recovery_error_curve(cfg, {}), std::invalid_argument);
}

TEST_CASE("run_bias_variance_sweep smoke") {
  SweepConfig cfg;
  cfg.n = 80;
  cfg.num_mc = 3;
  cfg.num_pts = 4;
  cfg.noise = NoiseSpec::gaussian(0.25);
  cfg.max_retries = 2;
  cfg.seed = 31337;
  const auto curve = run_bias_variance_sweep(cfg);
  REQUIRE(curve.series.size() == 3);
  CHECK(curve.series[0].name == "gnw");
  CHECK(curve.series[1].name == "enw-sp");
  CHECK(curve.series[2].name == "enw-spectral");
  CHECK(curve.grid_values.size() == 4);
  CHECK(curve.tau_cv > 0.0);
  for (const auto& s : curve.series)
    for (const auto& p : s.points) {
      CHECK(p.replicas <= 3);
      if (p.replicas > 0) {
        CHECK(std::isfinite(p.mean));
        CHECK(p.mean >= 0.0);
      } else {
        CHECK(std::isnan(p.mean));
      }
    }
  // GNW is defined whether or not the graph connects
  for (const auto& p : curve.series[0].points) CHECK(p.replicas == 3);

  const auto again = run_bias_variance_sweep(cfg);
  CHECK(curves_equal(curve, again));

  SweepConfig bad = cfg;
  bad.num_pts = 1;
  CHECK_THROWS_AS(run_bias_variance_sweep(bad), std::invalid_argument);
  bad = cfg;
  bad.num_mc = 0;
  CHECK_THROWS_AS(run_bias_variance_sweep(bad), std::invalid_argument);
  bad = cfg;
  bad.density = DensitySpec::uniform_box({{0.0, 1.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(run_bias_variance_sweep(bad), std::invalid_argument);
}

TEST_CASE("run_bias_variance_sweep over a bandwidth grid") {
  SweepConfig cfg;
  cfg.n = 50;
  cfg.num_mc = 2;
  cfg.num_pts = 3;
  cfg.h_g = 0.5;
  cfg.grid_kind = SweepConfig::GridKind::bandwidth;
  cfg.seed = 22;
  const auto curve = run_bias_variance_sweep(cfg);
  CHECK(curve.grid_values.size() == 3);
  // the graph scale is fixed and generous, so recovery always runs
  for (const auto& p : curve.series[1].points) CHECK(p.replicas == 2);
}

TEST_CASE("failure_probability_estimate") {
  SweepConfig cfg;
  cfg.n = 30;
  cfg.h_g = 0.5;
  cfg.seed = 7;

  // the window radius dwarfs any achievable distance error
  const auto zero = failure_probability_estimate(cfg, "sp", 100.0, 20, 5);
  CHECK(zero.mean == 0.0);
  CHECK(zero.replicas == 20);

  // tau = 0 makes every positive error a failure
  const auto one = failure_probability_estimate(cfg, "sp", 0.0, 20, 5);
  CHECK(one.mean == 1.0);

  // shared replicate draws make the curve exactly monotone in tau
  double prev = 1.0;
  for (double tau : {0.02, 0.1, 0.3, 1.0, 5.0}) {
    const double p = failure_probability_estimate(cfg, "sp", tau, 20, 5).mean;
    CHECK(p <= prev);
    prev = p;
  }

  CHECK_THROWS_AS(failure_probability_estimate(cfg, "sp", -1.0, 20, 5), std::invalid_argument);
  CHECK_THROWS_AS(failure_probability_estimate(cfg, "hops", 1.0, 20, 5), std::invalid_argument);
}
