#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lpreg/errors.hpp"
#include "lpreg/experiments.hpp"

// JSON run configuration. The schema is strict: unknown keys anywhere in the
// document are rejected before any computation. Every field has a default, so
// {} is a valid config; the fully resolved document is echoed next to the
// outputs as config.echo.json and reproduces the run exactly.

namespace lpreg {

using json = nlohmann::json;

struct RunConfig {
  SweepConfig sweep;
  std::string out_dir = "out";
  bool plot = false;
  std::string estimator = "gnw";   // predict
  std::string algorithm = "sp";    // recover / recovery-curve failure studies
  std::vector<double> delta_multiples = {0.0, 1.0, 2.0};
  std::vector<double> h_grid;      // recovery-curve; empty = log grid below
  double h_min = 0.01;
  double h_max = 1.0;
  bool oracle_distances = false;   // predict debug reduction: ENW on true distances
};

namespace detail {

inline void expect_keys(const json& obj, const std::string& ctx,
                        std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw config_error("unknown key \"" + it.key() + "\" in " + ctx);
  }
}

inline double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw config_error(std::string(key) + " must be a number");
  return v.get<double>();
}

inline long get_int(const json& obj, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw config_error(std::string(key) + " must be an integer");
  return v.get<long>();
}

inline bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw config_error(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

inline std::string get_str(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw config_error(std::string(key) + " must be a string");
  return v.get<std::string>();
}

inline KernelProfile parse_profile(const std::string& name, const std::string& ctx) {
  if (name == "box") return KernelProfile::box;
  if (name == "gaussian") return KernelProfile::gaussian;
  if (name == "truncated_gaussian" || name == "truncated-gaussian")
    return KernelProfile::truncated_gaussian;
  throw config_error("unknown profile \"" + name + "\" in " + ctx);
}

inline DensitySpec parse_density(const json& obj) {
  expect_keys(obj, "density", {"kind", "bounds", "dim", "mean", "stddev"});
  const std::string kind = get_str(obj, "kind", "uniform_box");
  if (kind == "uniform_box") {
    std::vector<std::pair<double, double>> bounds{{0.0, 1.0}};
    if (obj.contains("bounds")) {
      const json& b = obj.at("bounds");
      if (!b.is_array() || b.empty()) throw config_error("density.bounds must be a nonempty array");
      bounds.clear();
      for (const json& pair : b) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
          throw config_error("density.bounds entries must be [lo, hi] pairs");
        bounds.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
    }
    return DensitySpec::uniform_box(bounds);
  }
  if (kind == "gaussian") {
    const int dim = static_cast<int>(get_int(obj, "dim", 1));
    if (dim < 1) throw config_error("density.dim must be >= 1");
    const std::vector<double> mean(dim, get_num(obj, "mean", 0.0));
    const std::vector<double> stddev(dim, get_num(obj, "stddev", 1.0));
    return DensitySpec::gaussian(mean, stddev);
  }
  throw config_error("unknown density.kind \"" + kind + "\"");
}

inline RegressionFunction parse_regression(const json& obj) {
  expect_keys(obj, "regression", {"kind", "m", "value"});
  const std::string kind = get_str(obj, "kind", "sine");
  if (kind == "sine") return RegressionFunction::sine(static_cast<int>(get_int(obj, "m", 1)));
  if (kind == "constant") return RegressionFunction::constant(get_num(obj, "value", 0.0));
  if (kind == "linear") return RegressionFunction::linear();
  throw config_error("unknown regression.kind \"" + kind + "\"");
}

inline AveragingKernel parse_phi(const std::string& name) {
  if (name == "rectangular" || name == "box") return AveragingKernel::rectangular();
  if (name == "gaussian") return AveragingKernel::gaussian();
  if (name == "truncated_gaussian" || name == "truncated-gaussian")
    return AveragingKernel::truncated_gaussian();
  throw config_error("unknown phi \"" + name + "\"");
}

}  // namespace detail

inline RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw config_error("config root must be a JSON object");
  detail::expect_keys(doc, "config",
                      {"n", "density", "link", "regression", "noise_variance", "phi", "tau",
                       "num_mc", "num_pts", "seed", "grid", "linear_grid", "fixed_positions",
                       "spectral", "max_retries", "out", "plot", "estimator", "algorithm",
                       "delta_multiples", "h_grid", "h_min", "h_max", "oracle_distances"});
  RunConfig rc;
  SweepConfig& sc = rc.sweep;
  sc.n = static_cast<int>(detail::get_int(doc, "n", sc.n));
  if (sc.n < 2) throw config_error("n must be >= 2");
  if (doc.contains("density")) sc.density = detail::parse_density(doc.at("density"));
  if (doc.contains("link")) {
    const json& l = doc.at("link");
    detail::expect_keys(l, "link", {"profile", "alpha", "h_g"});
    sc.link_profile = detail::parse_profile(detail::get_str(l, "profile", "gaussian"), "link");
    sc.alpha = detail::get_num(l, "alpha", 1.0);
    sc.h_g = detail::get_num(l, "h_g", 0.1);
    if (!(sc.alpha >= 0.0 && sc.alpha <= 1.0)) throw config_error("link.alpha must be in [0,1]");
    if (!(sc.h_g > 0.0)) throw config_error("link.h_g must be > 0");
  }
  if (doc.contains("regression")) sc.f = detail::parse_regression(doc.at("regression"));
  const double nv = detail::get_num(doc, "noise_variance", 0.0);
  if (!(nv >= 0.0)) throw config_error("noise_variance must be >= 0");
  sc.noise = nv > 0.0 ? NoiseSpec::gaussian(nv) : NoiseSpec::none();
  sc.phi = detail::parse_phi(detail::get_str(doc, "phi", "rectangular"));
  if (doc.contains("tau")) {
    const json& t = doc.at("tau");
    if (t.is_string()) {
      if (t.get<std::string>() != "cv") throw config_error("tau must be a number or \"cv\"");
      sc.tau = std::numeric_limits<double>::quiet_NaN();
    } else if (t.is_number()) {
      sc.tau = t.get<double>();
      if (!(sc.tau > 0.0)) throw config_error("tau must be > 0");
    } else {
      throw config_error("tau must be a number or \"cv\"");
    }
  }
  sc.num_mc = static_cast<int>(detail::get_int(doc, "num_mc", sc.num_mc));
  sc.num_pts = static_cast<int>(detail::get_int(doc, "num_pts", sc.num_pts));
  if (sc.num_mc < 1) throw config_error("num_mc must be >= 1");
  if (sc.num_pts < 2) throw config_error("num_pts must be >= 2");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    // Value-based check: nlohmann stores C++-constructed positive ints as
    // signed, so is_number_unsigned() alone would reject them.
    const bool nonneg_int =
        s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0);
    if (!nonneg_int) throw config_error("seed must be a nonnegative integer");
    sc.seed = s.get<std::uint64_t>();
  }
  const std::string grid = detail::get_str(doc, "grid", "lengthscale");
  if (grid == "lengthscale")
    sc.grid_kind = SweepConfig::GridKind::lengthscale;
  else if (grid == "bandwidth")
    sc.grid_kind = SweepConfig::GridKind::bandwidth;
  else
    throw config_error("grid must be \"lengthscale\" or \"bandwidth\"");
  sc.linear_grid = detail::get_bool(doc, "linear_grid", sc.linear_grid);
  sc.fixed_positions = detail::get_bool(doc, "fixed_positions", sc.fixed_positions);
  if (doc.contains("spectral")) {
    const json& s = doc.at("spectral");
    detail::expect_keys(s, "spectral", {"q", "rho0"});
    sc.spectral.q = detail::get_num(s, "q", sc.spectral.q);
    sc.spectral.rho0 = detail::get_num(s, "rho0", sc.spectral.rho0);
  }
  try {
    sc.spectral.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  sc.max_retries = static_cast<int>(detail::get_int(doc, "max_retries", sc.max_retries));
  if (sc.max_retries < 0) throw config_error("max_retries must be >= 0");

  rc.out_dir = detail::get_str(doc, "out", rc.out_dir);
  rc.plot = detail::get_bool(doc, "plot", rc.plot);
  rc.estimator = detail::get_str(doc, "estimator", rc.estimator);
  if (rc.estimator != "gnw" && rc.estimator != "nw" && rc.estimator != "enw-sp" &&
      rc.estimator != "enw-spectral")
    throw config_error("estimator must be one of gnw, nw, enw-sp, enw-spectral");
  rc.algorithm = detail::get_str(doc, "algorithm", rc.algorithm);
  if (rc.algorithm != "sp" && rc.algorithm != "spectral")
    throw config_error("algorithm must be \"sp\" or \"spectral\"");
  if (doc.contains("delta_multiples")) {
    const json& d = doc.at("delta_multiples");
    if (!d.is_array() || d.empty())
      throw config_error("delta_multiples must be a nonempty array");
    rc.delta_multiples.clear();
    for (const json& v : d) {
      if (!v.is_number() || v.get<double>() < 0.0)
        throw config_error("delta_multiples entries must be numbers >= 0");
      rc.delta_multiples.push_back(v.get<double>());
    }
  }
  if (doc.contains("h_grid")) {
    const json& g = doc.at("h_grid");
    if (!g.is_array()) throw config_error("h_grid must be an array");
    for (const json& v : g) {
      if (!v.is_number() || !(v.get<double>() > 0.0))
        throw config_error("h_grid entries must be numbers > 0");
      rc.h_grid.push_back(v.get<double>());
    }
  }
  rc.h_min = detail::get_num(doc, "h_min", rc.h_min);
  rc.h_max = detail::get_num(doc, "h_max", rc.h_max);
  if (!(rc.h_min > 0.0 && rc.h_max > rc.h_min))
    throw config_error("need 0 < h_min < h_max");
  rc.oracle_distances = detail::get_bool(doc, "oracle_distances", rc.oracle_distances);
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return parse_run_config(json::object());
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  return parse_run_config(doc);
}

// Fully resolved document: every field explicit, so feeding it back as
// --config reproduces the run byte for byte.
inline json resolved_config_json(const RunConfig& rc) {
  const SweepConfig& sc = rc.sweep;
  json density;
  if (sc.density.kind == DensitySpec::Kind::uniform_box) {
    json bounds = json::array();
    for (const auto& [lo, hi] : sc.density.bounds) bounds.push_back({lo, hi});
    density = {{"kind", "uniform_box"}, {"bounds", bounds}};
  } else {
    density = {{"kind", "gaussian"},
               {"dim", sc.density.dim()},
               {"mean", sc.density.mean.front()},
               {"stddev", sc.density.stddev.front()}};
  }
  json regression;
  switch (sc.f.kind) {
    case RegressionFunction::Kind::sine:
      regression = {{"kind", "sine"}, {"m", sc.f.m}};
      break;
    case RegressionFunction::Kind::constant:
      regression = {{"kind", "constant"}, {"value", sc.f.c}};
      break;
    default:
      regression = {{"kind", "linear"}};
      break;
  }
  json doc = {
      {"n", sc.n},
      {"density", density},
      {"link",
       {{"profile", profile_name(sc.link_profile)}, {"alpha", sc.alpha}, {"h_g", sc.h_g}}},
      {"regression", regression},
      {"noise_variance", sc.noise.active() ? sc.noise.variance : 0.0},
      {"phi", sc.phi.name()},
      {"num_mc", sc.num_mc},
      {"num_pts", sc.num_pts},
      {"seed", sc.seed},
      {"grid", sc.grid_kind == SweepConfig::GridKind::lengthscale ? "lengthscale" : "bandwidth"},
      {"linear_grid", sc.linear_grid},
      {"fixed_positions", sc.fixed_positions},
      {"spectral", {{"q", sc.spectral.q}, {"rho0", sc.spectral.rho0}}},
      {"max_retries", sc.max_retries},
      {"out", rc.out_dir},
      {"plot", rc.plot},
      {"estimator", rc.estimator},
      {"algorithm", rc.algorithm},
      {"delta_multiples", rc.delta_multiples},
      {"h_grid", rc.h_grid},
      {"h_min", rc.h_min},
      {"h_max", rc.h_max},
      {"oracle_distances", rc.oracle_distances},
  };
  if (sc.tau_is_cv())
    doc["tau"] = "cv";
  else
    doc["tau"] = sc.tau;
  return doc;
}

}  // namespace lpreg
