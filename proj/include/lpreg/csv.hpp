#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lpreg/errors.hpp"
#include "lpreg/experiments.hpp"

// CSV emission. Every file starts with a header row; numeric fields are
// printed with 17 significant digits so identical runs produce byte-identical
// files.

namespace lpreg {

inline std::string csv_field(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(long v) { return std::to_string(v); }
inline std::string csv_field(int v) { return std::to_string(v); }
inline std::string csv_field(std::uint64_t v) { return std::to_string(v); }
inline std::string csv_field(bool v) { return v ? "true" : "false"; }

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw io_error("cannot open " + path + " for writing");
    path_ = path;
    write_row(header);
  }

  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw io_error("write failed on " + path_);
  }

  void close() {
    out_.close();
    if (out_.fail()) throw io_error("close failed on " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

// Schema: grid_value,estimator,mse_mean,mse_stderr,num_replicas,num_retries,seed
// One row per (grid point, series), grid-major, series in declaration order.
// Missing points keep their row with nan statistics and num_replicas = 0.
inline void write_risk_curve_csv(const std::string& path, const RiskCurve& curve) {
  CsvWriter w(path, {"grid_value", "estimator", "mse_mean", "mse_stderr", "num_replicas",
                     "num_retries", "seed"});
  for (std::size_t gi = 0; gi < curve.grid_values.size(); ++gi) {
    for (const Series& s : curve.series) {
      const CurvePoint& p = s.points.at(gi);
      w.write_row({csv_field(curve.grid_values[gi]), s.name, csv_field(p.mean),
                   csv_field(p.std_error), csv_field(p.replicas), csv_field(p.retries),
                   csv_field(curve.seed)});
    }
  }
  w.close();
}

}  // namespace lpreg
