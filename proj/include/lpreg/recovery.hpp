#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpreg/estimators.hpp"
#include "lpreg/model.hpp"

// Latent-distance recovery from the adjacency matrix. Two algorithms:
//   shortest-path recovery: hop distances (Floyd-Warshall) + classical MDS;
//   spectral recovery: low-rank denoising of A, re-thresholding into A_q,
//     then shortest-path recovery on A_q.
// Hop counts know the latent distance only up to the length-scale, so
// recovered positions are normalized to unit range per coordinate; the
// absolute scale is absorbed downstream by the cross-validated bandwidth.

namespace lpreg {

struct HopDistanceMatrix {
  static constexpr std::int32_t kUnreachable = std::numeric_limits<std::int32_t>::max();

  int n = 0;
  std::vector<std::int32_t> d;  // row-major

  std::int32_t at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  bool reachable(int i, int j) const { return at(i, j) != kUnreachable; }

  // Dense real matrix with +inf across components.
  Eigen::MatrixXd as_real_matrix() const {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = reachable(i, j) ? static_cast<double>(at(i, j))
                                  : std::numeric_limits<double>::infinity();
    return m;
  }
};

struct PositionEstimate {
  Eigen::MatrixXd positions;  // d x count
  std::string algorithm;
  // Hyperparameters used (NaN when not applicable).
  double q = std::numeric_limits<double>::quiet_NaN();
  double rho0 = std::numeric_limits<double>::quiet_NaN();

  int dim() const { return static_cast<int>(positions.rows()); }
  int count() const { return static_cast<int>(positions.cols()); }
};

struct SpectralConfig {
  double q = 0.9;      // threshold in (0,1)
  double rho0 = 0.01;  // eigenvalue tolerance >= 0

  void validate() const {
    if (!(q > 0 && q < 1)) throw std::invalid_argument("spectral config: q must be in (0,1)");
    if (!(rho0 >= 0)) throw std::invalid_argument("spectral config: rho0 must be >= 0");
  }
};

inline HopDistanceMatrix floyd_warshall(const Graph& g) {
  const int n = g.n_nodes;
  // Internal infinity small enough that inf + inf cannot overflow.
  constexpr std::int32_t kInf = 1 << 29;
  HopDistanceMatrix out;
  out.n = n;
  out.d.assign(static_cast<std::size_t>(n) * n, kInf);
  for (int i = 0; i < n; ++i) {
    out.d[static_cast<std::size_t>(i) * n + i] = 0;
    for (int j = 0; j < n; ++j)
      if (g.at(i, j)) out.d[static_cast<std::size_t>(i) * n + j] = 1;
  }
  for (int k = 0; k < n; ++k) {
    const std::int32_t* dk = &out.d[static_cast<std::size_t>(k) * n];
    for (int i = 0; i < n; ++i) {
      const std::int32_t dik = out.d[static_cast<std::size_t>(i) * n + k];
      if (dik >= kInf) continue;
      std::int32_t* di = &out.d[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) {
        const std::int32_t via = dik + dk[j];
        if (via < di[j]) di[j] = via;
      }
    }
  }
  for (auto& v : out.d)
    if (v >= kInf) v = HopDistanceMatrix::kUnreachable;
  return out;
}

namespace detail {

// Symmetric eigendecomposition with eigenvalues descending and each
// eigenvector's first nonzero coordinate positive (reproducible orientation).
struct EigenDecomposition {
  std::vector<double> values;  // descending
  Eigen::MatrixXd vectors;     // column k pairs with values[k]
};

inline EigenDecomposition symmetric_eigs_desc(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigendecomposition failed");
  const int n = static_cast<int>(m.rows());
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = n - 1 - k;  // Eigen sorts ascending
    out.values[k] = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    out.vectors.col(k) = v;
  }
  return out;
}

}  // namespace detail

inline std::vector<double> descending_eigenvalues(const Eigen::MatrixXd& m) {
  return detail::symmetric_eigs_desc(m).values;
}

// Torgerson double centering: B = -1/2 J D^2 J, embed with the top-dim
// eigenpairs, coordinates scaled by sqrt of the (clamped) eigenvalues.
inline PositionEstimate classical_mds(const Eigen::MatrixXd& dist, int dim) {
  if (dim < 1) throw std::invalid_argument("classical_mds: dim must be >= 1");
  if (dist.rows() != dist.cols()) throw std::invalid_argument("classical_mds: matrix not square");
  if (!dist.allFinite()) throw std::invalid_argument("classical_mds: infinite entry");
  const int n = static_cast<int>(dist.rows());
  Eigen::MatrixXd d2 = dist.array().square();
  const Eigen::VectorXd row_mean = d2.rowwise().mean();
  const double grand_mean = d2.mean();
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - row_mean(j) + grand_mean);
  const auto eig = detail::symmetric_eigs_desc(b);
  PositionEstimate out;
  out.algorithm = "cmds";
  out.positions.resize(dim, n);
  for (int k = 0; k < dim && k < n; ++k) {
    const double scale = std::sqrt(std::max(eig.values[k], 0.0));
    out.positions.row(k) = scale * eig.vectors.col(k).transpose();
  }
  if (dim > n) out.positions.bottomRows(dim - n).setZero();
  return out;
}

namespace detail {
inline void normalize_unit_range(Eigen::MatrixXd& positions) {
  for (int k = 0; k < positions.rows(); ++k) {
    const double lo = positions.row(k).minCoeff();
    const double hi = positions.row(k).maxCoeff();
    if (hi > lo)
      positions.row(k) = (positions.row(k).array() - lo) / (hi - lo);
    else
      positions.row(k).setZero();
  }
}
}  // namespace detail

// Algorithm "B_sp": hop distances + classical MDS, unit-range normalized.
inline PositionEstimate recover_sp(const Graph& g, int dim) {
  if (!is_connected(g))
    throw disconnected_graph_error("recover_sp: graph is not connected");
  const HopDistanceMatrix hops = floyd_warshall(g);
  PositionEstimate est = classical_mds(hops.as_real_matrix(), dim);
  detail::normalize_unit_range(est.positions);
  est.algorithm = "sp";
  return est;
}

// r = #{ sigma_i > -(1+rho0) sigma_n } on a descending spectrum; all-zero
// spectra give r = 0 (the degenerate empty-graph case).
inline int spectral_rank(const std::vector<double>& eigs_desc, double rho0) {
  if (eigs_desc.empty()) throw std::invalid_argument("spectral_rank: empty spectrum");
  for (std::size_t i = 1; i < eigs_desc.size(); ++i)
    if (eigs_desc[i - 1] < eigs_desc[i])
      throw std::invalid_argument("spectral_rank: eigenvalues not descending");
  bool all_zero = true;
  for (double v : eigs_desc)
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) return 0;
  const double threshold = -(1.0 + rho0) * eigs_desc.back();
  int r = 0;
  for (double v : eigs_desc)
    if (v > threshold) ++r;
  return r;
}

// K_hat = sum of the top-r eigenpairs of A.
inline Eigen::MatrixXd denoise_adjacency(const Graph& g, double rho0) {
  const auto eig = detail::symmetric_eigs_desc(g.as_real_matrix());
  const int r = spectral_rank(eig.values, rho0);
  const int n = g.n_nodes;
  Eigen::MatrixXd khat = Eigen::MatrixXd::Zero(n, n);
  if (r > 0) {
    Eigen::MatrixXd vr = eig.vectors.leftCols(r);
    Eigen::VectorXd sr(r);
    for (int k = 0; k < r; ++k) sr(k) = eig.values[k];
    khat = vr * sr.asDiagonal() * vr.transpose();
    khat = 0.5 * (khat + khat.transpose()).eval();  // exact symmetry for thresholding
  }
  return khat;
}

// A_q entries: strict indicator K_hat > q off the diagonal.
inline Graph threshold_adjacency(const Eigen::MatrixXd& khat, double q) {
  if (khat.rows() != khat.cols())
    throw std::invalid_argument("threshold_adjacency: matrix not square");
  const int n = static_cast<int>(khat.rows());
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (khat(i, j) > q) g.set(i, j, true);
  return g;
}

// Algorithm "B_spectral": denoise, threshold, then shortest-path recovery on A_q.
inline PositionEstimate recover_spectral(const Graph& g, const SpectralConfig& cfg, int dim) {
  cfg.validate();
  Graph aq = threshold_adjacency(denoise_adjacency(g, cfg.rho0), cfg.q);
  aq.seed = g.seed;
  if (!is_connected(aq))
    throw disconnected_graph_error("recover_spectral: thresholded graph A_q disconnected (q=" +
                                   std::to_string(cfg.q) + ")");
  PositionEstimate est = recover_sp(aq, dim);
  est.algorithm = "spectral";
  est.q = cfg.q;
  est.rho0 = cfg.rho0;
  return est;
}

// Least-squares affine alignment of a 1-d estimate onto the truth; handles the
// sign/scale/translation ambiguity of MDS output. Error reporting only.
inline PositionEstimate align_1d(const PositionEstimate& estimate, const LatentSample& truth) {
  if (estimate.dim() != 1 || truth.dim() != 1)
    throw std::invalid_argument("align_1d: inputs must be univariate");
  if (estimate.count() != truth.count())
    throw std::invalid_argument("align_1d: count mismatch");
  const int n = estimate.count();
  const Eigen::RowVectorXd e = estimate.positions.row(0);
  const Eigen::RowVectorXd t = truth.positions.row(0);
  const double em = e.mean(), tm = t.mean();
  double var = 0.0, cov = 0.0;
  for (int i = 0; i < n; ++i) {
    var += (e(i) - em) * (e(i) - em);
    cov += (e(i) - em) * (t(i) - tm);
  }
  if (var <= 0.0) throw std::invalid_argument("align_1d: zero-variance estimate");
  const double slope = cov / var;
  PositionEstimate out = estimate;
  out.positions.row(0) = slope * (e.array() - em) + tm;
  return out;
}

// Distances from the query column to all others, in node order.
inline DistanceEstimate distances_from_positions(const Eigen::MatrixXd& positions, int query) {
  const int n = static_cast<int>(positions.cols());
  if (query < 0 || query >= n)
    throw std::out_of_range("distances_from_positions: bad query index");
  DistanceEstimate est;
  est.values.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    if (i == query) continue;
    est.values.push_back((positions.col(i) - positions.col(query)).norm());
  }
  return est;
}

inline DistanceEstimate distances_from_positions(const PositionEstimate& est, int query) {
  return distances_from_positions(est.positions, query);
}

// Delta = sup-norm error between estimated and true distances.
inline double distance_error_delta(const DistanceEstimate& estimated,
                                   const DistanceEstimate& truth) {
  if (estimated.values.size() != truth.values.size())
    throw std::invalid_argument("distance_error_delta: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < truth.values.size(); ++i)
    m = std::max(m, std::abs(estimated.values[i] - truth.values[i]));
  return m;
}

// D = 2 max_i ||x_tilde_i - x_i|| over all nodes; dominates Delta.
inline double position_error_D(const PositionEstimate& aligned, const LatentSample& truth) {
  if (aligned.count() != truth.count() || aligned.dim() != truth.dim())
    throw std::invalid_argument("position_error_D: shape mismatch");
  double m = 0.0;
  for (int i = 0; i < truth.count(); ++i)
    m = std::max(m, (aligned.positions.col(i) - truth.positions.col(i)).norm());
  return 2.0 * m;
}

}  // namespace lpreg
