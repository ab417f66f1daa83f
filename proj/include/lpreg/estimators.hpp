#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpreg/model.hpp"

// Local-averaging node-regression estimators: Nadaraya-Watson on known
// distances, its graph version GNW (plain neighbor average), ENW on estimated
// distances, and the perturbed in-sample smoother used by the bias-variance
// experiments. All follow the "0 when the window is empty" convention.

namespace lpreg {

// User-side averaging kernel phi. "rectangular" is the box profile.
struct AveragingKernel {
  KernelProfile profile = KernelProfile::box;

  static AveragingKernel rectangular() { return AveragingKernel{KernelProfile::box}; }
  static AveragingKernel gaussian() { return AveragingKernel{KernelProfile::gaussian}; }
  static AveragingKernel truncated_gaussian() {
    return AveragingKernel{KernelProfile::truncated_gaussian};
  }

  double phi(double t) const { return profile_eval(profile, t); }
  double m1() const { return profile_m1(profile); }
  double m2() const { return profile_m2(profile); }
  std::string name() const {
    return profile == KernelProfile::box ? "rectangular" : profile_name(profile);
  }
};

struct BandwidthGrid {
  std::vector<double> values;  // strictly increasing, all > 0

  static BandwidthGrid log_spaced(double lo, double hi, int count) {
    if (!(lo > 0 && hi > lo && count >= 2))
      throw std::invalid_argument("log_spaced grid needs 0 < lo < hi, count >= 2");
    BandwidthGrid g;
    g.values.resize(count);
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < count; ++i)
      g.values[i] = std::exp(la + (lb - la) * i / static_cast<double>(count - 1));
    return g;
  }
  static BandwidthGrid linear_spaced(double lo, double hi, int count) {
    if (!(lo > 0 && hi > lo && count >= 2))
      throw std::invalid_argument("linear_spaced grid needs 0 < lo < hi, count >= 2");
    BandwidthGrid g;
    g.values.resize(count);
    for (int i = 0; i < count; ++i)
      g.values[i] = lo + (hi - lo) * i / static_cast<double>(count - 1);
    return g;
  }
  // Two-decade window around a cross-validated bandwidth (the default grid).
  static BandwidthGrid around(double tau_cv, int count = 50, bool linear = false) {
    return linear ? linear_spaced(0.1 * tau_cv, 10.0 * tau_cv, count)
                  : log_spaced(0.1 * tau_cv, 10.0 * tau_cv, count);
  }
  // Used before any tau_CV is known.
  static BandwidthGrid fallback(int count = 50) { return log_spaced(1e-3, 1.0, count); }

  std::size_t size() const { return values.size(); }
};

struct Prediction {
  double value = 0.0;
  bool denominator_positive = false;
};

// Output of the recovery module: estimated distances from the regression node
// to the labeled nodes, consumed here by enw_predict.
struct DistanceEstimate {
  std::vector<double> values;
};

inline Prediction nw_predict(const std::vector<double>& distances, const LabelVector& labels,
                             const AveragingKernel& phi, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("nw_predict: tau must be > 0");
  if (distances.size() != labels.size())
    throw std::invalid_argument("nw_predict: distances/labels length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const double w = phi.phi(distances[i] / tau);
    num += labels[i] * w;
    den += w;
  }
  if (den > 0.0) return Prediction{num / den, true};
  return Prediction{0.0, false};
}

inline Prediction gnw_predict(const Graph& graph, const LabelVector& labels, int node) {
  if (node < 0 || node >= graph.n_nodes)
    throw std::out_of_range("gnw_predict: bad node index");
  double sum = 0.0;
  long deg = 0;
  const int labeled = static_cast<int>(labels.size());
  for (int j = 0; j < labeled; ++j) {
    if (j == node) continue;
    if (graph.at(node, j)) {
      sum += labels[j];
      ++deg;
    }
  }
  if (deg > 0) return Prediction{sum / static_cast<double>(deg), true};
  return Prediction{0.0, false};
}

inline Prediction enw_predict(const DistanceEstimate& est, const LabelVector& labels,
                              const AveragingKernel& phi, double tau) {
  return nw_predict(est.values, labels, phi, tau);
}

// Pairwise Euclidean distances between columns.
inline Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& positions) {
  const int n = static_cast<int>(positions.cols());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = (positions.col(i) - positions.col(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

// Leave-self-out NW smoothing of the labels on a precomputed distance matrix:
// prediction for node i averages over j != i.
inline std::vector<double> insample_nw(const Eigen::MatrixXd& dist, const LabelVector& labels,
                                       const AveragingKernel& phi, double tau) {
  const int n = static_cast<int>(labels.size());
  if (dist.rows() < n || dist.cols() < n)
    throw std::invalid_argument("insample_nw: distance matrix smaller than label set");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = phi.phi(dist(i, j) / tau);
      num += labels[j] * w;
      den += w;
    }
    out[i] = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

// In-sample smoother on jittered inputs: every position is perturbed once by
// delta * u_i with u_i uniform on [-1,1], then each node is smoothed over all
// nodes including itself (self-weight phi(0) = 1 keeps the denominator > 0).
inline std::vector<double> perturbed_nw_smooth(const Eigen::VectorXd& positions,
                                               const LabelVector& labels,
                                               const AveragingKernel& phi, double tau,
                                               double delta, std::uint64_t seed) {
  const int n = static_cast<int>(positions.size());
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("perturbed_nw_smooth: labels/positions length mismatch");
  if (!(tau > 0)) throw std::invalid_argument("perturbed_nw_smooth: tau must be > 0");
  if (!(delta >= 0)) throw std::invalid_argument("perturbed_nw_smooth: delta must be >= 0");
  CounterRng rng(derive_seed(seed, detail::kTagPerturb));
  std::vector<double> xp(n);
  for (int i = 0; i < n; ++i) {
    const double u = 2.0 * rng.uniform(static_cast<std::uint64_t>(i)) - 1.0;
    xp[i] = positions(i) + delta * u;
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = phi.phi(std::abs(xp[i] - xp[j]) / tau);
      num += labels[j] * w;
      den += w;
    }
    out[i] = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

inline double smoothed_mse(const std::vector<double>& smoothed,
                           const std::vector<double>& f_values) {
  if (smoothed.size() != f_values.size())
    throw std::invalid_argument("smoothed_mse: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    const double d = smoothed[i] - f_values[i];
    s += d * d;
  }
  return s / static_cast<double>(smoothed.size());
}

// Leave-one-out CV over the grid; each point is predicted by NW over the other
// n-1, empty windows score the 0 prediction. Ties break toward the smallest
// tau so the result is deterministic.
inline double loocv_bandwidth(const Eigen::MatrixXd& positions, const LabelVector& labels,
                              const AveragingKernel& phi, const BandwidthGrid& grid) {
  const int n = static_cast<int>(labels.size());
  if (n < 2) throw std::invalid_argument("loocv_bandwidth: need n >= 2");
  if (grid.values.empty()) throw std::invalid_argument("loocv_bandwidth: empty grid");
  if (positions.cols() < n)
    throw std::invalid_argument("loocv_bandwidth: positions/labels mismatch");
  const Eigen::MatrixXd dist = pairwise_distances(positions.leftCols(n));
  double best_tau = grid.values.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double tau : grid.values) {
    const auto pred = insample_nw(dist, labels, phi, tau);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = pred[i] - labels[i];
      err += d * d;
    }
    if (err < best_err) {  // strict: ties keep the smaller tau seen first
      best_err = err;
      best_tau = tau;
    }
  }
  return best_tau;
}

// tau* of order n^{-1/(2a+d)}.
inline double optimal_bandwidth_rate(long n, double a, int d, double c) {
  if (n < 1 || !(a > 0 && a <= 1) || d < 1 || !(c > 0))
    throw std::invalid_argument("optimal_bandwidth_rate: bad parameters");
  return c * std::pow(static_cast<double>(n), -1.0 / (2.0 * a + static_cast<double>(d)));
}

}  // namespace lpreg
