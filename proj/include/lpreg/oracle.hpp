#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "lpreg/model.hpp"
#include "lpreg/rng.hpp"

// Analytic quantities of the model, used as independent test oracles:
// local edge density c(x), expected degree d(x) = n c(x), smoothing operator
// S(f,x), bias/variance proxies, the exact GNW expectation, and the
// closed-form risk bounds.

namespace lpreg {

struct IntegrationSpec {
  enum class Method { trapezoid, monte_carlo } method = Method::trapezoid;
  long resolution = 10000;  // grid points (trapezoid) or sample count (MC)
  std::uint64_t seed = 0x0A0B0C0D;

  // 1-d densities integrate on a fixed grid; d >= 2 falls back to Monte Carlo.
  static IntegrationSpec default_for(const DensitySpec& density) {
    IntegrationSpec s;
    if (density.dim() == 1) {
      s.method = Method::trapezoid;
      s.resolution = 10000;
    } else {
      s.method = Method::monte_carlo;
      s.resolution = 100000;
    }
    return s;
  }

  void validate() const {
    if (resolution < 100) throw std::invalid_argument("integration resolution too low (< 100)");
  }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long replicas = 0;
};

namespace detail {

// Closed forms exist for the box profile on a 1-d uniform box: the kernel
// window is an interval and the integrals are elementary.
inline bool closed_form_applies(const LinkKernel& link, const DensitySpec& density) {
  return link.profile == KernelProfile::box &&
         density.kind == DensitySpec::Kind::uniform_box && density.dim() == 1;
}

struct Window {
  double lo = 0.0, hi = 0.0;
  double length() const { return hi > lo ? hi - lo : 0.0; }
};

inline Window box_window(double x, const LinkKernel& link, const DensitySpec& density) {
  const auto& [lo, hi] = density.bounds[0];
  return Window{std::max(x - link.h_g, lo), std::min(x + link.h_g, hi)};
}

// Antiderivative of f on the window for the closed-form kinds.
inline double integral_over_interval(const RegressionFunction& f, double a, double b) {
  switch (f.kind) {
    case RegressionFunction::Kind::constant:
      return f.c * (b - a);
    case RegressionFunction::Kind::linear:
      return 0.5 * (b * b - a * a);
    case RegressionFunction::Kind::sine: {
      const double w = 2.0 * M_PI * f.m;
      return (std::cos(w * a) - std::cos(w * b)) / w;
    }
    default:
      throw std::logic_error("no closed-form integral for this regression kind");
  }
}

inline bool closed_form_f(const RegressionFunction& f) {
  return f.kind != RegressionFunction::Kind::custom;
}

// Trapezoid rule for g(z) = weight(z) * k(x,z) * p(z) over the part of the
// kernel's numeric support where p is positive.
template <typename Fn>
double trapezoid_kernel_integral(double x, const LinkKernel& link,
                                 const DensitySpec& density, const IntegrationSpec& integ,
                                 Fn&& weight) {
  const double radius = profile_numeric_support(link.profile) * link.h_g;
  double a = x - radius, b = x + radius;
  if (density.kind == DensitySpec::Kind::uniform_box) {
    a = std::max(a, density.bounds[0].first);
    b = std::min(b, density.bounds[0].second);
  }
  if (!(a < b)) return 0.0;
  const long n = integ.resolution;
  const double step = (b - a) / static_cast<double>(n - 1);
  Eigen::VectorXd z1(1);
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const double z = a + step * static_cast<double>(i);
    z1(0) = z;
    const double g = weight(z) * kernel_eval(link, std::abs(z - x)) * density.pdf(z1);
    sum += (i == 0 || i == n - 1) ? 0.5 * g : g;
  }
  return sum * step;
}

// Monte Carlo E_p[weight(z) k(x,z)] with stderr; shared draws let callers form
// ratio estimates consistently.
template <typename Fn>
McEstimate mc_kernel_integral(const Eigen::VectorXd& x, const LinkKernel& link,
                              const DensitySpec& density, const IntegrationSpec& integ,
                              Fn&& weight) {
  const int d = density.dim();
  CounterRng rng(derive_seed(integ.seed, 0x111));
  double sum = 0.0, sumsq = 0.0;
  Eigen::VectorXd z(d);
  for (long r = 0; r < integ.resolution; ++r) {
    for (int j = 0; j < d; ++j) {
      const std::uint64_t k = static_cast<std::uint64_t>(r) * d + j;
      if (density.kind == DensitySpec::Kind::uniform_box)
        z(j) = rng.uniform(k, density.bounds[j].first, density.bounds[j].second);
      else
        z(j) = density.mean[j] + density.stddev[j] * rng.gaussian(k);
    }
    const double g = weight(z) * kernel_eval(link, (z - x).norm());
    sum += g;
    sumsq += g * g;
  }
  const double n = static_cast<double>(integ.resolution);
  McEstimate e;
  e.mean = sum / n;
  e.replicas = integ.resolution;
  const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
  e.std_error = std::sqrt(var / n);
  return e;
}

}  // namespace detail

// c(x) = integral of k(x,z) p(z) dz. `mc_err` (optional) receives the Monte
// Carlo stderr when the MC path runs, 0 on exact/quadrature paths.
inline double local_edge_density(const Eigen::VectorXd& x, const LinkKernel& link,
                                 const DensitySpec& density, const IntegrationSpec& integ,
                                 double* mc_err = nullptr) {
  integ.validate();
  if (mc_err) *mc_err = 0.0;
  if (detail::closed_form_applies(link, density)) {
    const auto w = detail::box_window(x(0), link, density);
    return link.alpha * w.length() * density.uniform_value();
  }
  if (density.dim() == 1 && integ.method == IntegrationSpec::Method::trapezoid) {
    return detail::trapezoid_kernel_integral(x(0), link, density, integ,
                                             [](double) { return 1.0; });
  }
  const auto e = detail::mc_kernel_integral(x, link, density, integ,
                                            [](const Eigen::VectorXd&) { return 1.0; });
  if (mc_err) *mc_err = e.std_error;
  return e.mean;
}

inline double local_edge_density(double x, const LinkKernel& link,
                                 const DensitySpec& density, const IntegrationSpec& integ) {
  Eigen::VectorXd v(1);
  v(0) = x;
  return local_edge_density(v, link, density, integ);
}

// d(x) = n c(x)
inline double expected_degree(const Eigen::VectorXd& x, const LinkKernel& link,
                              const DensitySpec& density, long n,
                              const IntegrationSpec& integ) {
  return static_cast<double>(n) * local_edge_density(x, link, density, integ);
}

// S(f,x) = (1/c(x)) * integral of f(z) k(x,z) p(z) dz, 0 when c(x) = 0.
inline double smoothing_operator(const RegressionFunction& f, const Eigen::VectorXd& x,
                                 const LinkKernel& link, const DensitySpec& density,
                                 const IntegrationSpec& integ) {
  integ.validate();
  if (detail::closed_form_applies(link, density) && detail::closed_form_f(f)) {
    const auto w = detail::box_window(x(0), link, density);
    if (w.length() <= 0.0 || link.alpha <= 0.0) return 0.0;
    return detail::integral_over_interval(f, w.lo, w.hi) / w.length();
  }
  if (density.dim() == 1 && integ.method == IntegrationSpec::Method::trapezoid) {
    const double c = local_edge_density(x, link, density, integ);
    if (c <= 0.0) return 0.0;
    const double num = detail::trapezoid_kernel_integral(
        x(0), link, density, integ, [&](double z) { return f.eval(z); });
    return num / c;
  }
  // Ratio estimate on shared draws.
  const auto num = detail::mc_kernel_integral(
      x, link, density, integ, [&](const Eigen::VectorXd& z) { return f.eval(z); });
  const auto den = detail::mc_kernel_integral(
      x, link, density, integ, [](const Eigen::VectorXd&) { return 1.0; });
  if (den.mean <= 0.0) return 0.0;
  return num.mean / den.mean;
}

inline double smoothing_operator(const RegressionFunction& f, double x,
                                 const LinkKernel& link, const DensitySpec& density,
                                 const IntegrationSpec& integ) {
  Eigen::VectorXd v(1);
  v(0) = x;
  return smoothing_operator(f, v, link, density, integ);
}

// b(x) = S(f,x) - f(x)
inline double bias_proxy(const RegressionFunction& f, const Eigen::VectorXd& x,
                         const LinkKernel& link, const DensitySpec& density,
                         const IntegrationSpec& integ) {
  return smoothing_operator(f, x, link, density, integ) - f.eval(x);
}

// E[GNW(x)] = S(f,x) (1 - (1 - c(x))^n), exact for any n.
inline double gnw_expectation_oracle(const RegressionFunction& f, const Eigen::VectorXd& x,
                                     const LinkKernel& link, const DensitySpec& density,
                                     long n, const IntegrationSpec& integ) {
  const double c = local_edge_density(x, link, density, integ);
  if (c <= 0.0) return 0.0;
  const double s = smoothing_operator(f, x, link, density, integ);
  return s * (1.0 - std::pow(1.0 - c, static_cast<double>(n)));
}

// v(x) = E[(GNW(x) - S(f,x))^2] by Monte Carlo over fresh positions, edges to
// x, and label noise.
inline McEstimate variance_proxy_mc(const RegressionFunction& f, const Eigen::VectorXd& x,
                                    const LinkKernel& link, const DensitySpec& density,
                                    const NoiseSpec& noise, int n, long replicas,
                                    std::uint64_t seed) {
  if (replicas < 1000) throw std::invalid_argument("variance_proxy_mc: replicas must be >= 1000");
  const auto integ = IntegrationSpec::default_for(density);
  const double s_val = smoothing_operator(f, x, link, density, integ);
  const int d = density.dim();
  const double sigma = noise.active() ? noise.sigma() : 0.0;
  double sum = 0.0, sumsq = 0.0;
  Eigen::VectorXd z(d);
  for (long r = 0; r < replicas; ++r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    CounterRng pos_rng(derive_seed(rs, detail::kTagPositions));
    CounterRng edge_rng(derive_seed(rs, detail::kTagEdges));
    CounterRng noise_rng(derive_seed(rs, detail::kTagNoise));
    double acc = 0.0;
    long deg = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        const std::uint64_t k = static_cast<std::uint64_t>(i) * d + j;
        if (density.kind == DensitySpec::Kind::uniform_box)
          z(j) = pos_rng.uniform(k, density.bounds[j].first, density.bounds[j].second);
        else
          z(j) = density.mean[j] + density.stddev[j] * pos_rng.gaussian(k);
      }
      const double p = kernel_eval(link, (z - x).norm());
      if (edge_rng.uniform_oc(static_cast<std::uint64_t>(i)) <= p) {
        double y = f.eval(z);
        if (sigma > 0) y += sigma * noise_rng.gaussian(static_cast<std::uint64_t>(i));
        acc += y;
        ++deg;
      }
    }
    const double gnw = deg > 0 ? acc / static_cast<double>(deg) : 0.0;
    const double dev = gnw - s_val;
    sum += dev * dev;
    sumsq += dev * dev * dev * dev;
  }
  const double nn = static_cast<double>(replicas);
  McEstimate e;
  e.mean = sum / nn;
  e.replicas = replicas;
  e.std_error = std::sqrt(std::max(0.0, (sumsq - sum * sum / nn) / (nn - 1)) / nn);
  return e;
}

// Volume of the d-dimensional unit ball.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// Constants entering the closed-form risk bounds. v_d is derived from the
// dimension; sqrt_density_integral is the precomputed integral of p^{1/2}.
struct BoundParams {
  double L = 1.0, a = 1.0, B = 1.0, sigma2 = 0.0;
  double M1 = 1.0, M2 = 1.0;
  double p0 = 1.0, c0 = 0.5, r0 = 1.0;
  double b = 1.0, S = 1.0;  // density Holder regularity
  double sqrt_density_integral = 1.0;
  long n = 1;
  double alpha = 1.0;
  int d = 1;
  double v_d() const { return unit_ball_volume(d); }
};

// First risk bound: C1 h^{2a} + C2 / (n alpha h^d), with
// C1 = 4 L^2 M2^{2a} and C2 = (36 B^2 + 8 sigma^2) / (p0 c0 v_d M1^d).
inline double risk_bound_1(double h, const BoundParams& p) {
  if (!(p.M1 * h < p.r0)) throw std::invalid_argument("risk_bound_1 requires M1*h < r0");
  const double c1 = 4.0 * p.L * p.L * std::pow(p.M2, 2.0 * p.a);
  const double c2 = (36.0 * p.B * p.B + 8.0 * p.sigma2) /
                    (p.p0 * p.c0 * p.v_d() * std::pow(p.M1, p.d));
  return c1 * std::pow(h, 2.0 * p.a) +
         c2 / (static_cast<double>(p.n) * p.alpha * std::pow(h, p.d));
}

// Second risk bound (density only Holder-smooth):
// C1 h^{min(2a, b/2)} + C2 / (n alpha h^{d+b}), with
// C1 = 4 L^2 M2^{2a} + (8 B^2 + 2 sigma^2) S^{1/2} M1^{b/2} * integral(p^{1/2})
// and C2 = (36 B^2 + 8 sigma^2) / (c0 v_d S M1^{d+b}).
inline double risk_bound_2(double h, const BoundParams& p) {
  if (!(h < std::min(p.r0 / p.M1, 1.0)))
    throw std::invalid_argument("risk_bound_2 requires h < min(r0/M1, 1)");
  const double c1 = 4.0 * p.L * p.L * std::pow(p.M2, 2.0 * p.a) +
                    (8.0 * p.B * p.B + 2.0 * p.sigma2) * std::sqrt(p.S) *
                        std::pow(p.M1, 0.5 * p.b) * p.sqrt_density_integral;
  const double c2 = (36.0 * p.B * p.B + 8.0 * p.sigma2) /
                    (p.c0 * p.v_d() * p.S * std::pow(p.M1, p.d + p.b));
  return c1 * std::pow(h, std::min(2.0 * p.a, 0.5 * p.b)) +
         c2 / (static_cast<double>(p.n) * p.alpha * std::pow(h, p.d + p.b));
}

// M(tau): number of sample points within M1*tau/2 of the query node.
inline long window_count(const Eigen::MatrixXd& positions, int query, double tau, double m1) {
  if (query < 0 || query >= positions.cols())
    throw std::out_of_range("window_count: bad query index");
  const double radius = 0.5 * m1 * tau;
  long count = 0;
  for (int i = 0; i < positions.cols(); ++i) {
    if (i == query) continue;
    if ((positions.col(i) - positions.col(query)).norm() <= radius) ++count;
  }
  return count;
}

}  // namespace lpreg
