#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lpreg/config.hpp"
#include "lpreg/csv.hpp"
#include "lpreg/errors.hpp"
#include "lpreg/experiments.hpp"
#include "lpreg/recovery.hpp"
#include "lpreg/svg.hpp"

// Subcommand implementations. Orchestration is single-threaded; parallelism
// lives in the experiment loops. Exit codes: 0 success, 2 config error,
// 3 disconnected-graph error, 4 I/O error.

namespace lpreg::cli {

struct CliOptions {
  std::string config_path;
  std::optional<std::string> seed;  // decimal u64 or "entropy"
  std::optional<std::string> out;
  bool plot = false;
  std::optional<double> q;
  std::optional<double> rho0;
  bool linear_grid = false;
  bool oracle_distances = false;
};

namespace detail {

inline std::uint64_t parse_seed(const std::string& text) {
  if (text == "entropy") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw config_error("--seed expects a nonnegative integer or \"entropy\", got \"" + text +
                       "\"");
  }
}

inline RunConfig resolve(const CliOptions& opt) {
  RunConfig rc = load_run_config(opt.config_path);
  if (opt.seed) rc.sweep.seed = parse_seed(*opt.seed);
  if (opt.out) rc.out_dir = *opt.out;
  if (opt.plot) rc.plot = true;
  if (opt.q) rc.sweep.spectral.q = *opt.q;
  if (opt.rho0) rc.sweep.spectral.rho0 = *opt.rho0;
  if (opt.linear_grid) rc.sweep.linear_grid = true;
  if (opt.oracle_distances) rc.oracle_distances = true;
  try {
    rc.sweep.spectral.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  return rc;
}

inline void prepare_out_dir(const RunConfig& rc) {
  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) throw io_error("cannot create output directory " + rc.out_dir + ": " + ec.message());
  const std::string path = rc.out_dir + "/config.echo.json";
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << resolved_config_json(rc).dump(2) << '\n';
  if (!out) throw io_error("write failed on " + path);
}

inline std::string path_in(const RunConfig& rc, const std::string& name) {
  return rc.out_dir + "/" + name;
}

// Bandwidth for the single-instance commands: the config value, or LOOCV over
// the absolute fallback grid on whatever positions the estimator sees.
inline double single_shot_tau(const SweepConfig& sc, const Eigen::MatrixXd& positions,
                              const LabelVector& labels) {
  if (!sc.tau_is_cv()) return sc.tau;
  return loocv_bandwidth(positions, labels, sc.phi, BandwidthGrid::fallback());
}

}  // namespace detail

inline int cmd_sample(const RunConfig& rc) {
  const SweepConfig& sc = rc.sweep;
  detail::prepare_out_dir(rc);
  const LatentSample sample = sample_positions(sc.density, sc.n, sc.seed);
  const LabelVector labels = sample_labels(sample, sc.f, sc.noise, sc.seed, sc.n);
  const Graph graph = sample_graph(sample, LinkKernel(sc.link_profile, sc.alpha, sc.h_g), sc.seed);

  std::vector<std::string> pos_header{"node_id"};
  for (int j = 0; j < sc.density.dim(); ++j) pos_header.push_back("x_" + std::to_string(j + 1));
  CsvWriter pos(detail::path_in(rc, "positions.csv"), pos_header);
  for (int i = 0; i < sc.n; ++i) {
    std::vector<std::string> row{csv_field(i)};
    for (int j = 0; j < sc.density.dim(); ++j) row.push_back(csv_field(sample.positions(j, i)));
    pos.write_row(row);
  }
  pos.close();

  CsvWriter edges(detail::path_in(rc, "edges.csv"), {"i", "j"});
  for (int i = 0; i < sc.n; ++i)
    for (int j = i + 1; j < sc.n; ++j)
      if (graph.at(i, j)) edges.write_row({csv_field(i), csv_field(j)});
  edges.close();

  CsvWriter lab(detail::path_in(rc, "labels.csv"), {"node_id", "y"});
  for (int i = 0; i < sc.n; ++i) lab.write_row({csv_field(i), csv_field(labels[i])});
  lab.close();

  std::cout << "sampled n=" << sc.n << " nodes, " << graph.edge_count()
            << " edges, seed=" << sc.seed << " -> " << rc.out_dir << "\n";
  return 0;
}

inline int cmd_predict(const RunConfig& rc) {
  const SweepConfig& sc = rc.sweep;
  detail::prepare_out_dir(rc);
  const int n = sc.n;
  const LatentSample sample = sample_positions(sc.density, n + 1, sc.seed);
  const LabelVector labels = sample_labels(sample, sc.f, sc.noise, sc.seed);
  const LinkKernel link(sc.link_profile, sc.alpha, sc.h_g);

  Prediction pred;
  if (rc.estimator == "gnw") {
    const Graph graph = sample_graph(sample, link, sc.seed);
    pred = gnw_predict(graph, labels, n);
  } else if (rc.estimator == "nw" || rc.oracle_distances) {
    const double tau = detail::single_shot_tau(sc, sample.positions, labels);
    pred = nw_predict(distances_from_positions(sample.positions, n).values, labels, sc.phi, tau);
  } else {
    const Graph graph = sample_graph(sample, link, sc.seed);
    PositionEstimate est;
    if (rc.estimator == "enw-sp") {
      est = recover_sp(graph, sc.density.dim());
    } else {
      est = recover_spectral(graph, sc.spectral, sc.density.dim());
    }
    const double tau = detail::single_shot_tau(sc, est.positions, labels);
    pred = enw_predict(distances_from_positions(est, n), labels, sc.phi, tau);
  }

  CsvWriter out(detail::path_in(rc, "prediction.csv"),
                {"estimator", "value", "denominator_positive", "seed"});
  out.write_row({rc.estimator, csv_field(pred.value), csv_field(pred.denominator_positive),
                 csv_field(sc.seed)});
  out.close();
  std::cout << rc.estimator << " prediction for node " << n << ": " << csv_field(pred.value)
            << " (denominator_positive=" << (pred.denominator_positive ? "true" : "false")
            << ", seed=" << sc.seed << ")\n";
  return 0;
}

inline int cmd_recover(const RunConfig& rc) {
  const SweepConfig& sc = rc.sweep;
  if (sc.density.dim() != 1)
    throw config_error("recover reports aligned 1-d errors; use a univariate density");
  detail::prepare_out_dir(rc);
  const LatentSample sample = sample_positions(sc.density, sc.n, sc.seed);
  const Graph graph = sample_graph(sample, LinkKernel(sc.link_profile, sc.alpha, sc.h_g), sc.seed);
  PositionEstimate est = rc.algorithm == "sp" ? recover_sp(graph, 1)
                                              : recover_spectral(graph, sc.spectral, 1);
  const PositionEstimate aligned = align_1d(est, sample);

  CsvWriter pos(detail::path_in(rc, "recovered_positions.csv"),
                {"node_id", "x_true", "x_recovered", "abs_error"});
  for (int i = 0; i < sc.n; ++i) {
    const double t = sample.positions(0, i);
    const double r = aligned.positions(0, i);
    pos.write_row({csv_field(i), csv_field(t), csv_field(r), csv_field(std::abs(r - t))});
  }
  pos.close();

  // Delta is measured against the last node as the query.
  const double delta = distance_error_delta(distances_from_positions(aligned, sc.n - 1),
                                            distances_from_positions(sample.positions, sc.n - 1));
  const double d_err = position_error_D(aligned, sample);
  CsvWriter err(detail::path_in(rc, "recovery_error.csv"),
                {"algorithm", "delta", "D", "q", "rho0", "seed"});
  err.write_row({rc.algorithm, csv_field(delta), csv_field(d_err), csv_field(est.q),
                 csv_field(est.rho0), csv_field(sc.seed)});
  err.close();
  std::cout << rc.algorithm << " recovery: delta=" << csv_field(delta)
            << " D=" << csv_field(d_err) << " seed=" << sc.seed << "\n";
  return 0;
}

inline int cmd_sweep(const RunConfig& rc) {
  detail::prepare_out_dir(rc);
  const RiskCurve curve = run_bias_variance_sweep(rc.sweep);
  write_risk_curve_csv(detail::path_in(rc, "curves.csv"), curve);
  if (rc.plot)
    write_risk_curve_svg(detail::path_in(rc, "curves.svg"), curve, "in-sample smoothed MSE",
                         rc.sweep.grid_kind == SweepConfig::GridKind::lengthscale ? "h_g" : "tau",
                         "MSE", !rc.sweep.linear_grid);
  std::cout << "sweep: " << curve.grid_values.size() << " grid points, tau_cv="
            << csv_field(curve.tau_cv) << " -> " << detail::path_in(rc, "curves.csv") << "\n";
  return 0;
}

inline int cmd_perturbed_nw(const RunConfig& rc) {
  detail::prepare_out_dir(rc);
  const RiskCurve curve = run_perturbed_nw_experiment(rc.sweep, rc.delta_multiples);
  write_risk_curve_csv(detail::path_in(rc, "curves.csv"), curve);
  if (rc.plot)
    write_risk_curve_svg(detail::path_in(rc, "curves.svg"), curve, "perturbed in-sample NW",
                         "tau", "MSE", !rc.sweep.linear_grid);
  std::cout << "perturbed-nw: " << curve.series.size() << " series, tau_cv="
            << csv_field(curve.tau_cv) << " -> " << detail::path_in(rc, "curves.csv") << "\n";
  return 0;
}

inline int cmd_recovery_curve(const RunConfig& rc) {
  detail::prepare_out_dir(rc);
  std::vector<double> grid = rc.h_grid;
  if (grid.empty())
    grid = BandwidthGrid::log_spaced(rc.h_min, rc.h_max, rc.sweep.num_pts).values;
  const RiskCurve curve = run_recovery_error_curve(rc.sweep, grid);
  write_risk_curve_csv(detail::path_in(rc, "curves.csv"), curve);
  if (rc.plot)
    write_risk_curve_svg(detail::path_in(rc, "curves.svg"), curve, "position recovery error",
                         "h_g", "mean D", true);
  std::cout << "recovery-curve: " << grid.size() << " grid points -> "
            << detail::path_in(rc, "curves.csv") << "\n";
  return 0;
}

// Returns the process exit code.
inline int dispatch(const std::string& command, const CliOptions& opt) {
  try {
    const RunConfig rc = detail::resolve(opt);
    if (command == "sample") return cmd_sample(rc);
    if (command == "predict") return cmd_predict(rc);
    if (command == "recover") return cmd_recover(rc);
    if (command == "sweep") return cmd_sweep(rc);
    if (command == "perturbed-nw") return cmd_perturbed_nw(rc);
    if (command == "recovery-curve") return cmd_recovery_curve(rc);
    std::cerr << "unknown command: " << command << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const disconnected_graph_error& e) {
    std::cerr << "disconnected graph: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace lpreg::cli
