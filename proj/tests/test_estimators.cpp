#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lpreg/estimators.hpp"
#include "lpreg/model.hpp"
#include "lpreg/recovery.hpp"

using namespace lpreg;
using Catch::Approx;

namespace {
LabelVector make_labels(std::vector<double> v) {
  LabelVector l;
  l.values = std::move(v);
  return l;
}
}  // namespace

TEST_CASE("nw_predict") {
  const auto phi = AveragingKernel::rectangular();

  // equal-weight average of the in-window points
  auto p = nw_predict({0.1, 0.2}, make_labels({2.0, 4.0}), phi, 0.3);
  CHECK(p.value == 3.0);
  CHECK(p.denominator_positive);

  // constant labels: convex-combination identity
  p = nw_predict({0.1, 0.5, 2.0}, make_labels({5.0, 5.0, 5.0}), phi, 1.0);
  CHECK(p.value == 5.0);

  // empty window
  p = nw_predict({1.5, 2.5}, make_labels({2.0, 4.0}), phi, 1.0);
  CHECK(p.value == 0.0);
  CHECK_FALSE(p.denominator_positive);

  // gaussian phi, huge tau: all weights -> 1, value -> mean
  p = nw_predict({0.1, 0.9}, make_labels({2.0, 4.0}), AveragingKernel::gaussian(), 1e9);
  CHECK(p.value == Approx(3.0));

  CHECK_THROWS_AS(nw_predict({0.1}, make_labels({1.0, 2.0}), phi, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(nw_predict({0.1}, make_labels({1.0}), phi, 0.0), std::invalid_argument);

  // convex-combination bound over in-window points
  p = nw_predict({0.05, 0.15, 3.0}, make_labels({-1.0, 7.0, 100.0}), phi, 0.2);
  CHECK(p.value >= -1.0);
  CHECK(p.value <= 7.0);
}

TEST_CASE("gnw_predict") {
  Graph g(4);
  const auto labels = make_labels({2.0, 9.0, 4.0});

  // isolated query node
  auto p = gnw_predict(g, labels, 3);
  CHECK(p.value == 0.0);
  CHECK_FALSE(p.denominator_positive);

  // neighbors {0, 2} with labels 2 and 4
  g.set(3, 0, true);
  g.set(3, 2, true);
  p = gnw_predict(g, labels, 3);
  CHECK(p.value == 3.0);
  CHECK(p.denominator_positive);

  // complete graph: mean of all labels
  Graph k(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) k.set(i, j, true);
  CHECK(gnw_predict(k, labels, 3).value == Approx(5.0));

  CHECK_THROWS_AS(gnw_predict(g, labels, 4), std::out_of_range);
}

TEST_CASE("enw_predict reduces to nw_predict") {
  const auto phi = AveragingKernel::rectangular();
  const auto labels = make_labels({1.0, 9.0});

  // hand example: only the first point is inside the estimated window
  DistanceEstimate est{{0.12, 0.48}};
  auto p = enw_predict(est, labels, phi, 0.2);
  CHECK(p.value == 1.0);

  // exact distances: bit-for-bit reduction
  const std::vector<double> d{0.37, 0.81};
  const auto a = enw_predict(DistanceEstimate{d}, labels, phi, 0.5);
  const auto b = nw_predict(d, labels, phi, 0.5);
  CHECK(a.value == b.value);
  CHECK(a.denominator_positive == b.denominator_positive);

  // all estimated distances beyond the window
  p = enw_predict(DistanceEstimate{{5.0, 6.0}}, labels, phi, 1.0);
  CHECK(p.value == 0.0);
  CHECK_FALSE(p.denominator_positive);
}

TEST_CASE("gnw equals nw on deterministic geometric graphs") {
  // box profile, alpha=1: the graph is a_{ij} = 1[dist <= h_g], so GNW at the
  // query node is exactly NW with rectangular phi and tau = h_g.
  const double h = 0.15;
  const LinkKernel link(KernelProfile::box, 1.0, h);
  const auto phi = AveragingKernel::rectangular();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sample = sample_positions(DensitySpec::unit_interval(), 41, seed);
    const auto labels = sample_labels(sample, RegressionFunction::sine(1),
                                      NoiseSpec::gaussian(0.5), seed);
    const auto graph = sample_graph(sample, link, seed);
    const auto gnw = gnw_predict(graph, labels, 40);
    const auto nw =
        nw_predict(distances_from_positions(sample.positions, 40).values, labels, phi, h);
    CHECK(gnw.value == nw.value);
    CHECK(gnw.denominator_positive == nw.denominator_positive);
  }
}

TEST_CASE("smoothed_mse") {
  CHECK(smoothed_mse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(smoothed_mse({2.0, 3.0}, {1.0, 2.0}) == 1.0);
  CHECK(smoothed_mse({0.0, 2.0}, {1.0, 1.0}) == 1.0);
  CHECK_THROWS_AS(smoothed_mse({0.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("insample_nw leaves self out") {
  Eigen::MatrixXd pos(1, 3);
  pos << 0.0, 0.1, 0.9;
  const auto dist = pairwise_distances(pos);
  const auto labels = make_labels({2.0, 4.0, 7.0});
  const auto s = insample_nw(dist, labels, AveragingKernel::rectangular(), 0.2);
  CHECK(s[0] == 4.0);  // only neighbor 1 in window
  CHECK(s[1] == 2.0);
  CHECK(s[2] == 0.0);  // nothing within 0.2 of 0.9
}

TEST_CASE("perturbed_nw_smooth") {
  const auto phi = AveragingKernel::rectangular();
  Eigen::VectorXd pos(4);
  pos << 0.0, 0.3, 0.6, 1.0;
  const auto labels = make_labels({1.0, 2.0, 3.0, 4.0});

  // delta = 0, tau below the minimal spacing: self-weight only -> y_i back
  auto s = perturbed_nw_smooth(pos, labels, phi, 0.05, 0.0, 9);
  for (int i = 0; i < 4; ++i) CHECK(s[i] == labels[static_cast<std::size_t>(i)]);

  // delta = 0 is classical in-sample smoothing including the self term
  s = perturbed_nw_smooth(pos, labels, phi, 0.35, 0.0, 9);
  CHECK(s[0] == Approx(1.5));  // nodes {0, 1}
  CHECK(s[1] == Approx(2.0));  // nodes {0, 1, 2}

  // deterministic in the seed, sensitive to it
  const auto a = perturbed_nw_smooth(pos, labels, phi, 0.3, 0.2, 5);
  const auto b = perturbed_nw_smooth(pos, labels, phi, 0.3, 0.2, 5);
  CHECK(a == b);

  CHECK_THROWS_AS(perturbed_nw_smooth(pos, labels, phi, 0.0, 0.1, 5), std::invalid_argument);
  CHECK_THROWS_AS(perturbed_nw_smooth(pos, labels, phi, 0.3, -0.1, 5), std::invalid_argument);
}

TEST_CASE("perturbation stability of the rectangular window") {
  // With Delta <= M1 tau / 2, any point with delta_i <= M1 tau / 2 stays
  // inside the perturbed window: |x_i + D u_i - (x_j + D u_j)| <= delta + 2D
  // <= 2 M1 tau ... the rectangular window at scale tau keeps every point
  // with perturbed distance <= tau. Check the deterministic inclusion.
  const double tau = 0.4, m1 = 1.0;
  const double delta_mag = 0.5 * m1 * tau;
  CounterRng rng(33);
  for (int rep = 0; rep < 200; ++rep) {
    const double di = rng.uniform(2 * rep) * 0.5 * m1 * tau;  // true distance
    const double u1 = 2.0 * rng.uniform(1000 + 2 * rep) - 1.0;
    const double u2 = 2.0 * rng.uniform(1001 + 2 * rep) - 1.0;
    const double perturbed = std::abs(di + delta_mag * (u1 - u2));
    CHECK(perturbed <= di + 2.0 * delta_mag + 1e-15);
    CHECK(perturbed <= 1.5 * m1 * tau + 1e-15);
  }
}

TEST_CASE("noise-weight variance bound") {
  // For fixed weights w in [0,1], Var(sum eps_i w_i / sum w_i) over gaussian
  // noise is sigma^2 sum w^2 / (sum w)^2 <= sigma^2 min(1 / sum w, 1).
  const double sigma2 = 1.5;
  std::vector<double> w{0.2, 0.9, 0.4, 1.0, 0.05};
  double sw = 0.0, sw2 = 0.0;
  for (double v : w) {
    sw += v;
    sw2 += v * v;
  }
  const long draws = 100000;
  CounterRng rng(101);
  double sum = 0.0, sumsq = 0.0;
  for (long r = 0; r < draws; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      acc += std::sqrt(sigma2) * rng.gaussian(r * w.size() + i) * w[i];
    const double v = acc / sw;
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  const double exact = sigma2 * sw2 / (sw * sw);
  const double se = exact * std::sqrt(2.0 / draws);
  CHECK(var <= sigma2 * std::min(1.0 / sw, 1.0) + 3 * se);
  CHECK(std::abs(var - exact) <= 3 * se);
}

TEST_CASE("loocv bandwidth selection") {
  const auto phi = AveragingKernel::rectangular();

  // single grid value
  {
    Eigen::MatrixXd pos(1, 3);
    pos << 0.0, 0.5, 1.0;
    BandwidthGrid g;
    g.values = {0.7};
    CHECK(loocv_bandwidth(pos, make_labels({1.0, 2.0, 3.0}), phi, g) == 0.7);
  }

  // constant labels: every tau whose windows are all nonempty scores zero;
  // tie-break keeps the smallest such tau
  {
    Eigen::MatrixXd pos(1, 4);
    pos << 0.0, 0.25, 0.5, 0.75;
    BandwidthGrid g;
    g.values = {0.1, 0.3, 0.6, 1.0};
    CHECK(loocv_bandwidth(pos, make_labels({2.0, 2.0, 2.0, 2.0}), phi, g) == 0.3);
  }

  // rate sanity: n=500, sine(2), sigma^2=0.5 picks tau within factor 3 of
  // the n^{-1/3} rate value 0.126
  {
    const auto sample = sample_positions(DensitySpec::unit_interval(), 500, 31);
    const auto labels = sample_labels(sample, RegressionFunction::sine(2),
                                      NoiseSpec::gaussian(0.5), 31, 500);
    const double tau = loocv_bandwidth(sample.positions, labels, phi, BandwidthGrid::fallback());
    const double rate = optimal_bandwidth_rate(500, 1.0, 1, 1.0);
    CHECK(tau >= rate / 3.0);
    CHECK(tau <= rate * 3.0);
  }

  CHECK_THROWS_AS(loocv_bandwidth(Eigen::MatrixXd::Zero(1, 2), make_labels({1.0, 2.0}), phi,
                                  BandwidthGrid{}),
                  std::invalid_argument);
}

TEST_CASE("bandwidth grids") {
  const auto g = BandwidthGrid::log_spaced(0.01, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.values.front() == Approx(0.01));
  CHECK(g.values.back() == Approx(1.0));
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g.values[i] > g.values[i - 1]);
    // log-regular: constant ratio
    CHECK(g.values[i] / g.values[i - 1] == Approx(g.values[1] / g.values[0]));
  }
  const auto lin = BandwidthGrid::linear_spaced(0.1, 0.5, 5);
  CHECK(lin.values[1] - lin.values[0] == Approx(0.1));
  const auto win = BandwidthGrid::around(0.2, 50);
  CHECK(win.values.front() == Approx(0.02));
  CHECK(win.values.back() == Approx(2.0));
  CHECK(win.size() == 50);
  CHECK_THROWS_AS(BandwidthGrid::log_spaced(0.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(BandwidthGrid::log_spaced(0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("optimal bandwidth rate") {
  CHECK(optimal_bandwidth_rate(500, 1.0, 1, 1.0) == Approx(std::pow(500.0, -1.0 / 3.0)));
  CHECK(optimal_bandwidth_rate(1, 0.5, 2, 1.0) == 1.0);
  CHECK(optimal_bandwidth_rate(100000, 1.0, 3, 1.0) == Approx(0.1));
  CHECK_THROWS_AS(optimal_bandwidth_rate(0, 1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_bandwidth_rate(10, 1.5, 1, 1.0), std::invalid_argument);
}
