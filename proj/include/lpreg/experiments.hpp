#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "lpreg/estimators.hpp"
#include "lpreg/model.hpp"
#include "lpreg/oracle.hpp"
#include "lpreg/recovery.hpp"

// Monte Carlo risk estimation and the stock experiment protocols:
// perturbed-NW bandwidth curves, recovery-error-vs-length-scale curves, and
// the GNW / B_sp-ENW / B_spectral-ENW bias-variance sweep. Replicas run in
// parallel with derived seeds; results land in preallocated slots and are
// reduced in index order, so output is identical regardless of scheduling.

namespace lpreg {

constexpr std::uint64_t kDefaultSeed = 20250819ULL;

struct SweepConfig {
  int n = 500;
  DensitySpec density = DensitySpec::unit_interval();
  KernelProfile link_profile = KernelProfile::gaussian;
  double alpha = 1.0;
  double h_g = 0.1;  // single-instance commands and bandwidth sweeps
  RegressionFunction f = RegressionFunction::sine(1);
  NoiseSpec noise = NoiseSpec::none();
  AveragingKernel phi = AveragingKernel::rectangular();
  // NaN means "choose by LOOCV"; fixed values are interpreted on whatever
  // scale the estimator's distances live on.
  double tau = std::numeric_limits<double>::quiet_NaN();
  int num_mc = 20;
  int num_pts = 50;
  std::uint64_t seed = kDefaultSeed;
  enum class GridKind { lengthscale, bandwidth } grid_kind = GridKind::lengthscale;
  bool linear_grid = false;
  bool fixed_positions = false;  // redraw positions per replicate by default
  SpectralConfig spectral{};
  int max_retries = 10;

  bool tau_is_cv() const { return std::isnan(tau); }
};

struct CurvePoint {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  long replicas = 0;
  long retries = 0;
  bool missing() const { return replicas == 0; }
};

struct Series {
  std::string name;
  std::vector<CurvePoint> points;
};

struct RiskCurve {
  std::vector<double> grid_values;
  std::vector<Series> series;
  std::uint64_t seed = 0;
  double tau_cv = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

constexpr std::uint64_t kTagTauCv = 0x10;
constexpr std::uint64_t kTagSweep = 0x11;
constexpr std::uint64_t kTagFixedPos = 0x12;
constexpr std::uint64_t kTagPerturbRep = 0x13;
constexpr std::uint64_t kTagCurve = 0x14;
constexpr std::uint64_t kTagRiskPos = 0x15;
constexpr std::uint64_t kTagRiskRep = 0x16;
constexpr std::uint64_t kTagRiskTau = 0x17;
constexpr std::uint64_t kTagFailure = 0x18;

template <typename Fn>
void parallel_for(long count, Fn&& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers = std::min<unsigned>(hw > 0 ? hw : 1, static_cast<unsigned>(count));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

// Mean / stderr over the non-missing replicate slots (NaN marks missing).
inline CurvePoint reduce_point(const std::vector<double>& values, long retries) {
  CurvePoint p;
  p.retries = retries;
  double sum = 0.0;
  long k = 0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++k;
    }
  p.replicas = k;
  if (k == 0) return p;
  p.mean = sum / static_cast<double>(k);
  double ss = 0.0;
  for (double v : values)
    if (!std::isnan(v)) ss += (v - p.mean) * (v - p.mean);
  p.std_error = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k)) : 0.0;
  return p;
}

inline std::vector<double> f_values(const LatentSample& sample, const RegressionFunction& f,
                                    int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = f.eval(sample.node(i));
  return out;
}

inline double gnw_insample_mse(const Graph& g, const LabelVector& labels,
                               const std::vector<double>& fvals) {
  const int n = static_cast<int>(labels.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = gnw_predict(g, labels, i).value - fvals[i];
    s += d * d;
  }
  return s / static_cast<double>(n);
}

inline double enw_insample_mse(const PositionEstimate& est, const LabelVector& labels,
                               const AveragingKernel& phi, double tau,
                               const std::vector<double>& fvals) {
  const Eigen::MatrixXd dist = pairwise_distances(est.positions);
  return smoothed_mse(insample_nw(dist, labels, phi, tau), fvals);
}

}  // namespace detail

// tau_CV of the sweep protocols: LOOCV on true positions of a fresh instance,
// scanned over the absolute fallback grid.
inline double reference_tau_cv(const SweepConfig& cfg) {
  const std::uint64_t s = derive_seed(cfg.seed, detail::kTagTauCv);
  const LatentSample sample = sample_positions(cfg.density, cfg.n, s);
  const LabelVector labels = sample_labels(sample, cfg.f, cfg.noise, s, cfg.n);
  return loocv_bandwidth(sample.positions, labels, cfg.phi, BandwidthGrid::fallback());
}

// ---------------------------------------------------------------------------
// Bias-variance sweep (the GNW vs ENW protocol)
// ---------------------------------------------------------------------------

// For each grid length-scale p: generate an LPM with h_g = p, evaluate the
// in-sample smoothed MSE (each node predicted leave-self-out) of GNW and of
// ENW on both recovery algorithms, NUM_MC times. A replicate resamples until
// both the raw graph and A_q are connected (up to max_retries); on exhaustion
// GNW is still evaluated and the unsatisfied ENW variants are marked missing.
inline RiskCurve run_bias_variance_sweep(const SweepConfig& cfg) {
  if (cfg.density.dim() != 1)
    throw std::invalid_argument("run_bias_variance_sweep: univariate densities only");
  if (cfg.num_mc < 1 || cfg.num_pts < 2)
    throw std::invalid_argument("run_bias_variance_sweep: need NUM_MC >= 1, NUM_PTS >= 2");
  cfg.spectral.validate();

  const double tau_cv = reference_tau_cv(cfg);
  const BandwidthGrid grid = BandwidthGrid::around(tau_cv, cfg.num_pts, cfg.linear_grid);
  // ENW bandwidth selection grid: the default two-decade window around tau_CV.
  const BandwidthGrid tau_grid = BandwidthGrid::around(tau_cv);

  const int gp = static_cast<int>(grid.size());
  const long tasks = static_cast<long>(gp) * cfg.num_mc;
  std::vector<double> mse_gnw(tasks, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> mse_sp(tasks, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> mse_spec(tasks, std::numeric_limits<double>::quiet_NaN());
  std::vector<long> retries(tasks, 0);

  LatentSample fixed_sample;
  if (cfg.fixed_positions)
    fixed_sample = sample_positions(cfg.density, cfg.n, derive_seed(cfg.seed, detail::kTagFixedPos));

  detail::parallel_for(tasks, [&](long t) {
    const int gi = static_cast<int>(t / cfg.num_mc);
    const double h = (cfg.grid_kind == SweepConfig::GridKind::lengthscale) ? grid.values[gi]
                                                                           : cfg.h_g;
    const LinkKernel link(cfg.link_profile, cfg.alpha, h);
    const std::uint64_t rep_seed = derive_seed(derive_seed(cfg.seed, detail::kTagSweep),
                                               static_cast<std::uint64_t>(t));
    LatentSample sample;
    LabelVector labels;
    Graph graph;
    Graph aq;
    bool raw_ok = false, spec_ok = false;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const std::uint64_t s = derive_seed(rep_seed, static_cast<std::uint64_t>(attempt));
      sample = cfg.fixed_positions ? fixed_sample : sample_positions(cfg.density, cfg.n, s);
      labels = sample_labels(sample, cfg.f, cfg.noise, s, cfg.n);
      graph = sample_graph(sample, link, s);
      raw_ok = is_connected(graph);
      spec_ok = false;
      if (raw_ok) {
        aq = threshold_adjacency(denoise_adjacency(graph, cfg.spectral.rho0), cfg.spectral.q);
        aq.seed = graph.seed;
        spec_ok = is_connected(aq);
      }
      if (raw_ok && spec_ok) break;
      if (attempt < cfg.max_retries) ++retries[t];
    }
    const std::vector<double> fvals = detail::f_values(sample, cfg.f, cfg.n);
    const double tau_for = cfg.grid_kind == SweepConfig::GridKind::bandwidth ? grid.values[gi]
                                                                             : cfg.tau;
    mse_gnw[t] = detail::gnw_insample_mse(graph, labels, fvals);
    if (raw_ok) {
      PositionEstimate est = recover_sp(graph, 1);
      const double tau = !std::isnan(tau_for)
                             ? tau_for
                             : loocv_bandwidth(est.positions, labels, cfg.phi, tau_grid);
      mse_sp[t] = detail::enw_insample_mse(est, labels, cfg.phi, tau, fvals);
    }
    if (spec_ok) {
      PositionEstimate est = recover_sp(aq, 1);
      est.algorithm = "spectral";
      est.q = cfg.spectral.q;
      est.rho0 = cfg.spectral.rho0;
      const double tau = !std::isnan(tau_for)
                             ? tau_for
                             : loocv_bandwidth(est.positions, labels, cfg.phi, tau_grid);
      mse_spec[t] = detail::enw_insample_mse(est, labels, cfg.phi, tau, fvals);
    }
  });

  RiskCurve curve;
  curve.grid_values = grid.values;
  curve.seed = cfg.seed;
  curve.tau_cv = tau_cv;
  curve.series = {Series{"gnw", {}}, Series{"enw-sp", {}}, Series{"enw-spectral", {}}};
  for (int gi = 0; gi < gp; ++gi) {
    long rt = 0;
    std::vector<double> a(cfg.num_mc), b(cfg.num_mc), c(cfg.num_mc);
    for (int r = 0; r < cfg.num_mc; ++r) {
      const long t = static_cast<long>(gi) * cfg.num_mc + r;
      a[r] = mse_gnw[t];
      b[r] = mse_sp[t];
      c[r] = mse_spec[t];
      rt += retries[t];
    }
    curve.series[0].points.push_back(detail::reduce_point(a, rt));
    curve.series[1].points.push_back(detail::reduce_point(b, rt));
    curve.series[2].points.push_back(detail::reduce_point(c, rt));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Perturbed in-sample NW curves
// ---------------------------------------------------------------------------

// Smoothed-MSE-vs-tau curves for perturbation magnitudes Delta = k * tau_CV.
// Within a replicate the same uniform perturbation directions u_i are shared
// across all Delta and tau (only the magnitude scales), matching the
// x_{i,Delta} = x_i + Delta u_i construction.
inline RiskCurve run_perturbed_nw_experiment(const SweepConfig& cfg,
                                             const std::vector<double>& delta_multiples) {
  if (cfg.density.dim() != 1)
    throw std::invalid_argument("run_perturbed_nw_experiment: univariate only");
  const double tau_cv = reference_tau_cv(cfg);
  const BandwidthGrid grid = BandwidthGrid::around(tau_cv, cfg.num_pts, cfg.linear_grid);
  const int gp = static_cast<int>(grid.size());
  const int nd = static_cast<int>(delta_multiples.size());

  // slot layout: [delta][grid][replicate]
  std::vector<double> mse(static_cast<std::size_t>(nd) * gp * cfg.num_mc, 0.0);
  detail::parallel_for(cfg.num_mc, [&](long rep) {
    const std::uint64_t s = derive_seed(derive_seed(cfg.seed, detail::kTagPerturbRep),
                                        static_cast<std::uint64_t>(rep));
    const LatentSample sample = sample_positions(cfg.density, cfg.n, s);
    const LabelVector labels = sample_labels(sample, cfg.f, cfg.noise, s, cfg.n);
    const std::vector<double> fvals = detail::f_values(sample, cfg.f, cfg.n);
    const Eigen::VectorXd x = sample.positions.row(0).transpose();
    for (int di = 0; di < nd; ++di) {
      const double delta = delta_multiples[di] * tau_cv;
      for (int gi = 0; gi < gp; ++gi) {
        const auto smooth = perturbed_nw_smooth(x, labels, cfg.phi, grid.values[gi], delta, s);
        mse[(static_cast<std::size_t>(di) * gp + gi) * cfg.num_mc + rep] =
            smoothed_mse(smooth, fvals);
      }
    }
  });

  RiskCurve curve;
  curve.grid_values = grid.values;
  curve.seed = cfg.seed;
  curve.tau_cv = tau_cv;
  for (int di = 0; di < nd; ++di) {
    std::string label = "nw-delta-" + std::to_string(delta_multiples[di]);
    // integer multiples read better as "0x", "1x", "2x"
    const double m = delta_multiples[di];
    if (m == std::floor(m))
      label = "nw-delta-" + std::to_string(static_cast<long>(m)) + "x";
    Series series{label, {}};
    for (int gi = 0; gi < gp; ++gi) {
      std::vector<double> vals(cfg.num_mc);
      for (int r = 0; r < cfg.num_mc; ++r)
        vals[r] = mse[(static_cast<std::size_t>(di) * gp + gi) * cfg.num_mc + r];
      series.points.push_back(detail::reduce_point(vals, 0));
    }
    curve.series.push_back(std::move(series));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Recovery error vs length-scale
// ---------------------------------------------------------------------------

// Mean position-recovery error D per algorithm across a grid of h_g. Each
// algorithm retries sampling independently (shared attempt seeds) because
// their connectivity requirements differ.
inline RiskCurve run_recovery_error_curve(const SweepConfig& cfg,
                                          const std::vector<double>& h_grid) {
  if (cfg.density.dim() != 1)
    throw std::invalid_argument("run_recovery_error_curve: univariate only");
  if (h_grid.empty()) throw std::invalid_argument("run_recovery_error_curve: empty grid");
  cfg.spectral.validate();
  const int gp = static_cast<int>(h_grid.size());
  const long tasks = static_cast<long>(gp) * cfg.num_mc;
  std::vector<double> err_sp(tasks, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> err_spec(tasks, std::numeric_limits<double>::quiet_NaN());
  std::vector<long> retries_sp(tasks, 0), retries_spec(tasks, 0);

  detail::parallel_for(tasks, [&](long t) {
    const int gi = static_cast<int>(t / cfg.num_mc);
    const LinkKernel link(cfg.link_profile, cfg.alpha, h_grid[gi]);
    const std::uint64_t rep_seed = derive_seed(derive_seed(cfg.seed, detail::kTagCurve),
                                               static_cast<std::uint64_t>(t));
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const std::uint64_t s = derive_seed(rep_seed, static_cast<std::uint64_t>(attempt));
      const LatentSample sample = sample_positions(cfg.density, cfg.n, s);
      const Graph graph = sample_graph(sample, link, s);
      if (!is_connected(graph)) {
        if (attempt < cfg.max_retries) ++retries_sp[t];
        continue;
      }
      const PositionEstimate aligned = align_1d(recover_sp(graph, 1), sample);
      err_sp[t] = position_error_D(aligned, sample);
      break;
    }
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const std::uint64_t s = derive_seed(rep_seed, static_cast<std::uint64_t>(attempt));
      const LatentSample sample = sample_positions(cfg.density, cfg.n, s);
      const Graph graph = sample_graph(sample, link, s);
      Graph aq = threshold_adjacency(denoise_adjacency(graph, cfg.spectral.rho0), cfg.spectral.q);
      if (!is_connected(aq)) {
        if (attempt < cfg.max_retries) ++retries_spec[t];
        continue;
      }
      PositionEstimate est = recover_sp(aq, 1);
      est.algorithm = "spectral";
      err_spec[t] = position_error_D(align_1d(est, sample), sample);
      break;
    }
  });

  RiskCurve curve;
  curve.grid_values = h_grid;
  curve.seed = cfg.seed;
  curve.series = {Series{"sp", {}}, Series{"spectral", {}}};
  for (int gi = 0; gi < gp; ++gi) {
    std::vector<double> a(cfg.num_mc), b(cfg.num_mc);
    long ra = 0, rb = 0;
    for (int r = 0; r < cfg.num_mc; ++r) {
      const long t = static_cast<long>(gi) * cfg.num_mc + r;
      a[r] = err_sp[t];
      b[r] = err_spec[t];
      ra += retries_sp[t];
      rb += retries_spec[t];
    }
    curve.series[0].points.push_back(detail::reduce_point(a, ra));
    curve.series[1].points.push_back(detail::reduce_point(b, rb));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Pointwise / global Monte Carlo risk
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_enw_tag(const std::string& tag) {
  return tag == "enw-sp" || tag == "enw-spectral";
}

// One replicate of the estimator named by `tag` at the regression node (the
// last column). Returns squared error vs f(x_{n+1}).
inline double risk_replicate(const SweepConfig& cfg, const std::string& tag,
                             const LatentSample& sample, std::uint64_t replicate_seed,
                             double fixed_tau) {
  const int n = sample.count() - 1;
  const LinkKernel link(cfg.link_profile, cfg.alpha, cfg.h_g);
  const LabelVector labels = sample_labels(sample, cfg.f, cfg.noise, replicate_seed);
  const double target = cfg.f.eval(sample.node(n));
  Prediction pred;
  if (tag == "gnw") {
    const Graph graph = sample_graph(sample, link, replicate_seed);
    pred = gnw_predict(graph, labels, n);
  } else if (tag == "nw") {
    pred = nw_predict(distances_from_positions(sample.positions, n).values, labels, cfg.phi,
                      fixed_tau);
  } else if (is_enw_tag(tag)) {
    Graph graph;
    bool ok = false;
    Graph aq;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const std::uint64_t s = derive_seed(replicate_seed, static_cast<std::uint64_t>(attempt));
      graph = sample_graph(sample, link, s);
      if (tag == "enw-sp") {
        ok = is_connected(graph);
      } else {
        if (is_connected(graph)) {
          aq = threshold_adjacency(denoise_adjacency(graph, cfg.spectral.rho0), cfg.spectral.q);
          ok = is_connected(aq);
        }
      }
      if (ok) break;
    }
    if (!ok)
      throw disconnected_graph_error("mc risk: connectivity retries exhausted for " + tag);
    PositionEstimate est = tag == "enw-sp" ? recover_sp(graph, 1) : recover_sp(aq, 1);
    const double tau = cfg.tau_is_cv() ? loocv_bandwidth(est.positions, labels, cfg.phi,
                                                         BandwidthGrid::around(fixed_tau))
                                       : cfg.tau;
    pred = enw_predict(distances_from_positions(est.positions, n), labels, cfg.phi, tau);
  } else {
    throw std::invalid_argument("unknown estimator tag: " + tag);
  }
  const double d = pred.value - target;
  return d * d;
}

// Bandwidth used by the true-distance NW baseline and as the CV window center
// for ENW: the config's tau if set, else LOOCV on a reference instance.
inline double resolve_reference_tau(const SweepConfig& cfg) {
  if (!cfg.tau_is_cv()) return cfg.tau;
  SweepConfig ref = cfg;
  return reference_tau_cv(ref);
}

}  // namespace detail

// Risk at a fixed regression point: positions drawn once, averaged over fresh
// (edges, noise) replicas.
inline McEstimate mc_pointwise_risk(const SweepConfig& cfg, const std::string& tag,
                                    const Eigen::VectorXd& x, long replicas,
                                    std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("mc_pointwise_risk: replicas must be >= 2");
  LatentSample sample =
      sample_positions(cfg.density, cfg.n + 1, derive_seed(seed, detail::kTagRiskPos));
  sample.positions.col(cfg.n) = x;  // pin the regression node
  const double ref_tau = detail::resolve_reference_tau(cfg);
  std::vector<double> sq(replicas, 0.0);
  detail::parallel_for(replicas, [&](long r) {
    const std::uint64_t s = derive_seed(derive_seed(seed, detail::kTagRiskRep),
                                        static_cast<std::uint64_t>(r));
    sq[r] = detail::risk_replicate(cfg, tag, sample, s, ref_tau);
  });
  const auto p = detail::reduce_point(sq, 0);
  return McEstimate{p.mean, p.std_error, p.replicas};
}

// Global risk: positions (including the regression node) redrawn per replica.
inline McEstimate mc_global_risk(const SweepConfig& cfg, const std::string& tag, long replicas,
                                 std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("mc_global_risk: replicas must be >= 2");
  const double ref_tau = detail::resolve_reference_tau(cfg);
  std::vector<double> sq(replicas, 0.0);
  detail::parallel_for(replicas, [&](long r) {
    const std::uint64_t s = derive_seed(derive_seed(seed, detail::kTagRiskRep),
                                        static_cast<std::uint64_t>(r));
    const LatentSample sample = sample_positions(cfg.density, cfg.n + 1, s);
    sq[r] = detail::risk_replicate(cfg, tag, sample, s, ref_tau);
  });
  const auto p = detail::reduce_point(sq, 0);
  return McEstimate{p.mean, p.std_error, p.replicas};
}

// P(Delta > M1 tau / 2) for a recovery algorithm, by Monte Carlo. Replicate
// draws depend only on (seed, replicate index), so evaluating a tau grid on
// one seed reuses identical recoveries and the estimate is exactly monotone.
inline McEstimate failure_probability_estimate(const SweepConfig& cfg,
                                               const std::string& algorithm, double tau,
                                               long replicas, std::uint64_t seed) {
  if (!(tau >= 0)) throw std::invalid_argument("failure_probability_estimate: tau must be >= 0");
  if (algorithm != "sp" && algorithm != "spectral")
    throw std::invalid_argument("failure_probability_estimate: unknown algorithm " + algorithm);
  const LinkKernel link(cfg.link_profile, cfg.alpha, cfg.h_g);
  const double radius = 0.5 * cfg.phi.m1() * tau;
  LatentSample fixed_sample;
  if (cfg.fixed_positions)
    fixed_sample =
        sample_positions(cfg.density, cfg.n + 1, derive_seed(seed, detail::kTagRiskPos));
  std::vector<double> fail(replicas, 0.0);
  detail::parallel_for(replicas, [&](long r) {
    const std::uint64_t s = derive_seed(derive_seed(seed, detail::kTagFailure),
                                        static_cast<std::uint64_t>(r));
    const LatentSample sample =
        cfg.fixed_positions ? fixed_sample : sample_positions(cfg.density, cfg.n + 1, s);
    const Graph graph = sample_graph(sample, link, s);
    double delta = std::numeric_limits<double>::infinity();  // failure to run = failure
    try {
      PositionEstimate est;
      if (algorithm == "sp") {
        est = recover_sp(graph, 1);
      } else {
        est = recover_spectral(graph, cfg.spectral, 1);
      }
      const PositionEstimate aligned = align_1d(est, sample);
      delta = distance_error_delta(distances_from_positions(aligned, cfg.n),
                                   distances_from_positions(sample.positions, cfg.n));
    } catch (const disconnected_graph_error&) {
    } catch (const std::invalid_argument&) {
    }
    fail[r] = delta > radius ? 1.0 : 0.0;
  });
  const auto p = detail::reduce_point(fail, 0);
  return McEstimate{p.mean, p.std_error, p.replicas};
}

}  // namespace lpreg
