#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpreg/errors.hpp"
#include "lpreg/rng.hpp"

// Latent position model: nodes carry hidden positions x_i drawn i.i.d. from a
// density p on Q, an edge {i,j} appears independently with probability
// k(x_i,x_j) = alpha * K(||x_i - x_j|| / h_g), and labeled nodes carry
// y_i = f(x_i) + eps_i.

namespace lpreg {

namespace detail {
// Stream tags so that one user-facing seed can feed several independent
// counter streams without overlap.
constexpr std::uint64_t kTagPositions = 0x01;
constexpr std::uint64_t kTagEdges = 0x02;
constexpr std::uint64_t kTagNoise = 0x03;
constexpr std::uint64_t kTagPerturb = 0x04;
}  // namespace detail

// ---------------------------------------------------------------------------
// Radial kernel profiles (shared by the graph link and the averaging kernel)
// ---------------------------------------------------------------------------

enum class KernelProfile { box, gaussian, truncated_gaussian };

inline double profile_eval(KernelProfile p, double t) {
  switch (p) {
    case KernelProfile::box:
      return t <= 1.0 ? 1.0 : 0.0;
    case KernelProfile::gaussian:
      return std::exp(-t * t);
    case KernelProfile::truncated_gaussian:
      return t <= 2.0 ? std::exp(-t * t) : 0.0;
  }
  return 0.0;
}

// Largest t with profile(t) >= 1/2 (the M1 of the box assumption).
inline double profile_m1(KernelProfile p) {
  switch (p) {
    case KernelProfile::box:
      return 1.0;
    default:
      return std::sqrt(std::log(2.0));  // exp(-M1^2) = 1/2
  }
}

// Support radius M2: profile(t) = 0 for t > M2. Unbounded for the plain
// gaussian, which therefore violates the box assumption.
inline double profile_m2(KernelProfile p) {
  switch (p) {
    case KernelProfile::box:
      return 1.0;
    case KernelProfile::truncated_gaussian:
      return 2.0;
    case KernelProfile::gaussian:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

// Radius beyond which the profile is numerically zero; what quadrature uses.
inline double profile_numeric_support(KernelProfile p) {
  return p == KernelProfile::gaussian ? 8.5 : profile_m2(p);
}

inline std::string profile_name(KernelProfile p) {
  switch (p) {
    case KernelProfile::box:
      return "box";
    case KernelProfile::gaussian:
      return "gaussian";
    case KernelProfile::truncated_gaussian:
      return "truncated-gaussian";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// DensitySpec
// ---------------------------------------------------------------------------

struct DensitySpec {
  enum class Kind { uniform_box, gaussian } kind = Kind::uniform_box;
  // uniform-box: per-dimension [lo, hi]
  std::vector<std::pair<double, double>> bounds;
  // gaussian: per-dimension mean/stddev
  std::vector<double> mean, stddev;
  // Optional constants for risk-bound evaluation: density lower bound p0 and
  // Holder smoothness (b, S) of the density. NaN = not supplied.
  double p0 = std::numeric_limits<double>::quiet_NaN();
  double holder_b = std::numeric_limits<double>::quiet_NaN();
  double holder_S = std::numeric_limits<double>::quiet_NaN();

  static DensitySpec uniform_box(std::vector<std::pair<double, double>> b) {
    DensitySpec d;
    d.kind = Kind::uniform_box;
    for (auto& [lo, hi] : b)
      if (!(lo < hi)) throw std::invalid_argument("uniform-box bounds need lower < upper");
    d.bounds = std::move(b);
    return d;
  }
  static DensitySpec unit_interval() { return uniform_box({{0.0, 1.0}}); }
  static DensitySpec gaussian(std::vector<double> mean, std::vector<double> stddev) {
    if (mean.size() != stddev.size())
      throw std::invalid_argument("gaussian density: mean/stddev size mismatch");
    for (double s : stddev)
      if (!(s > 0)) throw std::invalid_argument("gaussian density: stddev must be > 0");
    DensitySpec d;
    d.kind = Kind::gaussian;
    d.mean = std::move(mean);
    d.stddev = std::move(stddev);
    return d;
  }

  int dim() const {
    return static_cast<int>(kind == Kind::uniform_box ? bounds.size() : mean.size());
  }

  double volume() const {  // uniform-box support volume
    double v = 1.0;
    for (auto& [lo, hi] : bounds) v *= (hi - lo);
    return v;
  }

  // Density value (product form in the gaussian case).
  double pdf(const Eigen::VectorXd& z) const {
    if (kind == Kind::uniform_box) {
      for (int j = 0; j < dim(); ++j)
        if (z(j) < bounds[j].first || z(j) > bounds[j].second) return 0.0;
      return 1.0 / volume();
    }
    double v = 1.0;
    for (int j = 0; j < dim(); ++j) {
      const double t = (z(j) - mean[j]) / stddev[j];
      v *= std::exp(-0.5 * t * t) / (stddev[j] * std::sqrt(2.0 * M_PI));
    }
    return v;
  }

  bool in_support(const Eigen::VectorXd& z) const {
    if (kind != Kind::uniform_box) return true;
    for (int j = 0; j < dim(); ++j)
      if (z(j) < bounds[j].first || z(j) > bounds[j].second) return false;
    return true;
  }

  // Uniform-box density value on its support; the analytic p0(x).
  double uniform_value() const { return 1.0 / volume(); }
};

// ---------------------------------------------------------------------------
// LinkKernel
// ---------------------------------------------------------------------------

struct LinkKernel {
  KernelProfile profile = KernelProfile::gaussian;
  double alpha = 1.0;  // (0,1]; alpha = 0 tolerated for tests
  double h_g = 0.1;    // length-scale > 0

  LinkKernel() = default;
  LinkKernel(KernelProfile prof, double a, double h) : profile(prof), alpha(a), h_g(h) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    if (!(h > 0.0)) throw std::invalid_argument("h_g must be > 0");
  }

  double m1() const { return profile_m1(profile); }
  double m2() const { return profile_m2(profile); }
};

// k(x,z) evaluated through the latent distance.
inline double kernel_eval(const LinkKernel& link, double dist) {
  if (dist < 0) throw std::invalid_argument("kernel_eval: negative distance");
  return link.alpha * profile_eval(link.profile, dist / link.h_g);
}

// ---------------------------------------------------------------------------
// RegressionFunction / NoiseSpec / LabelVector
// ---------------------------------------------------------------------------

struct RegressionFunction {
  enum class Kind { sine, constant, linear, custom } kind = Kind::sine;
  int m = 1;        // sine frequency: x -> sin(2*m*pi*x)
  double c = 0.0;   // constant value
  std::vector<std::pair<double, double>> table;  // custom: sorted (x, f(x))
  // Holder regularity |f(x)-f(z)| <= L|x-z|^a and sup bound B.
  double a = 1.0, L = 1.0, B = 1.0;

  static RegressionFunction sine(int m) {
    if (m < 1) throw std::invalid_argument("sine frequency must be >= 1");
    RegressionFunction f;
    f.kind = Kind::sine;
    f.m = m;
    f.a = 1.0;
    f.L = 2.0 * M_PI * m;
    f.B = 1.0;
    return f;
  }
  static RegressionFunction constant(double c) {
    RegressionFunction f;
    f.kind = Kind::constant;
    f.c = c;
    f.a = 1.0;
    f.L = 0.0;
    f.B = std::abs(c);
    return f;
  }
  static RegressionFunction linear() {  // f(x) = x, meant for [0,1]
    RegressionFunction f;
    f.kind = Kind::linear;
    f.a = 1.0;
    f.L = 1.0;
    f.B = 1.0;
    return f;
  }
  static RegressionFunction custom(std::vector<std::pair<double, double>> tbl,
                                   double a, double L, double B) {
    if (tbl.size() < 2) throw std::invalid_argument("custom table needs >= 2 points");
    RegressionFunction f;
    f.kind = Kind::custom;
    f.table = std::move(tbl);
    f.a = a;
    f.L = L;
    f.B = B;
    return f;
  }

  // Scalar profile; multivariate inputs are evaluated on the first coordinate
  // (the stock experiment setups are univariate).
  double eval(double x) const {
    switch (kind) {
      case Kind::sine:
        return std::sin(2.0 * M_PI * m * x);
      case Kind::constant:
        return c;
      case Kind::linear:
        return x;
      case Kind::custom: {
        if (x <= table.front().first) return table.front().second;
        if (x >= table.back().first) return table.back().second;
        for (std::size_t i = 1; i < table.size(); ++i) {
          if (x <= table[i].first) {
            const auto& [x0, y0] = table[i - 1];
            const auto& [x1, y1] = table[i];
            const double w = (x - x0) / (x1 - x0);
            return y0 + w * (y1 - y0);
          }
        }
        return table.back().second;
      }
    }
    return 0.0;
  }
  double eval(const Eigen::VectorXd& x) const { return eval(x(0)); }

  std::string name() const {
    switch (kind) {
      case Kind::sine:
        return "sine(" + std::to_string(m) + ")";
      case Kind::constant:
        return "constant";
      case Kind::linear:
        return "linear";
      case Kind::custom:
        return "custom";
    }
    return "?";
  }
};

struct NoiseSpec {
  enum class Kind { gaussian, none } kind = Kind::none;
  double variance = 0.0;

  static NoiseSpec gaussian(double var) {
    if (!(var >= 0)) throw std::invalid_argument("noise variance must be >= 0");
    NoiseSpec n;
    n.kind = Kind::gaussian;
    n.variance = var;
    return n;
  }
  static NoiseSpec none() { return NoiseSpec{}; }

  double sigma() const { return std::sqrt(variance); }
  bool active() const { return kind == Kind::gaussian && variance > 0; }
};

struct LabelVector {
  std::vector<double> values;
  RegressionFunction f;
  NoiseSpec noise;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// ---------------------------------------------------------------------------
// LatentSample
// ---------------------------------------------------------------------------

// Columns are nodes; under the pointwise-prediction convention the regression
// node x_{n+1} is the last column.
struct LatentSample {
  Eigen::MatrixXd positions;  // d x count
  DensitySpec density;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(positions.rows()); }
  int count() const { return static_cast<int>(positions.cols()); }
  Eigen::VectorXd node(int i) const { return positions.col(i); }
  double distance(int i, int j) const { return (positions.col(i) - positions.col(j)).norm(); }
};

inline LatentSample sample_positions(const DensitySpec& density, int count,
                                     std::uint64_t seed) {
  if (count < 2) throw std::invalid_argument("sample_positions: count must be >= 2");
  const int d = density.dim();
  if (d < 1) throw std::invalid_argument("sample_positions: density has no dimensions");
  CounterRng rng(derive_seed(seed, detail::kTagPositions));
  Eigen::MatrixXd pos(d, count);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::uint64_t k = static_cast<std::uint64_t>(i) * d + j;
      if (density.kind == DensitySpec::Kind::uniform_box) {
        pos(j, i) = rng.uniform(k, density.bounds[j].first, density.bounds[j].second);
      } else {
        pos(j, i) = density.mean[j] + density.stddev[j] * rng.gaussian(k);
      }
    }
  }
  return LatentSample{std::move(pos), density, seed};
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct Graph {
  int n_nodes = 0;
  std::vector<std::uint8_t> adjacency;  // row-major n x n, symmetric, zero diagonal
  std::uint64_t seed = 0;

  Graph() = default;
  explicit Graph(int n, std::uint64_t s = 0)
      : n_nodes(n), adjacency(static_cast<std::size_t>(n) * n, 0), seed(s) {}

  bool at(int i, int j) const {
    return adjacency[static_cast<std::size_t>(i) * n_nodes + j] != 0;
  }
  void set(int i, int j, bool v) {
    adjacency[static_cast<std::size_t>(i) * n_nodes + j] = v ? 1 : 0;
    adjacency[static_cast<std::size_t>(j) * n_nodes + i] = v ? 1 : 0;
  }

  Eigen::MatrixXd as_real_matrix() const {
    Eigen::MatrixXd a(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i)
      for (int j = 0; j < n_nodes; ++j) a(i, j) = at(i, j) ? 1.0 : 0.0;
    return a;
  }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (auto v : adjacency) c += v;
    return c / 2;
  }
};

// One uniform per unordered pair, taken in canonical (i<j) order from the
// counter stream, so the adjacency is reproducible and order-independent.
inline Graph sample_graph(const LatentSample& sample, const LinkKernel& link,
                          std::uint64_t seed) {
  const int n = sample.count();
  Graph g(n, seed);
  CounterRng rng(derive_seed(seed, detail::kTagEdges));
  std::uint64_t pair_index = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++pair_index) {
      const double p = kernel_eval(link, sample.distance(i, j));
      if (rng.uniform_oc(pair_index) <= p) g.set(i, j, true);
    }
  }
  return g;
}

// Labels y_i = f(x_i) + eps_i for the first `labeled` columns. The default
// labels all but the last column: the regression node stays unlabeled.
inline LabelVector sample_labels(const LatentSample& sample, const RegressionFunction& f,
                                 const NoiseSpec& noise, std::uint64_t seed,
                                 int labeled = -1) {
  if (!(noise.variance < std::numeric_limits<double>::infinity()))
    throw std::invalid_argument("sample_labels: noise variance must be finite");
  if (labeled < 0) labeled = sample.count() - 1;
  if (labeled > sample.count())
    throw std::invalid_argument("sample_labels: more labels than nodes");
  CounterRng rng(derive_seed(seed, detail::kTagNoise));
  LabelVector out;
  out.f = f;
  out.noise = noise;
  out.values.resize(labeled);
  const double sigma = noise.active() ? noise.sigma() : 0.0;
  for (int i = 0; i < labeled; ++i) {
    const double eps = sigma > 0 ? sigma * rng.gaussian(static_cast<std::uint64_t>(i)) : 0.0;
    out.values[i] = f.eval(sample.node(i)) + eps;
  }
  return out;
}

inline int empirical_degree(const Graph& g, int node) {
  if (node < 0 || node >= g.n_nodes) throw std::out_of_range("empirical_degree: bad node");
  int d = 0;
  for (int j = 0; j < g.n_nodes; ++j) d += g.at(node, j) ? 1 : 0;
  return d;
}

inline bool is_connected(const Graph& g) {
  if (g.n_nodes < 1) throw std::invalid_argument("is_connected: empty graph object");
  std::vector<char> seen(g.n_nodes, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int visited = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v = 0; v < g.n_nodes; ++v) {
      if (g.at(u, v) && !seen[v]) {
        seen[v] = 1;
        ++visited;
        q.push(v);
      }
    }
  }
  return visited == g.n_nodes;
}

}  // namespace lpreg
