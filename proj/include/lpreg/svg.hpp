#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "lpreg/errors.hpp"
#include "lpreg/experiments.hpp"

// Static SVG line plots, no external dependencies. One polyline per series,
// optional log-x, right-hand legend. NaN values split a series into segments
// instead of drawing through the gap.

namespace lpreg {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

}  // namespace detail

inline void write_line_plot(const std::string& path, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series, bool log_x) {
  const double width = 880, height = 540;
  const double left = 78, right = width - 180, top = 48, bottom = height - 58;

  // data ranges over finite (and, for log-x, positive) points
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double xv = s.x[i], yv = s.y[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      if (log_x && !(xv > 0)) continue;
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  const bool empty = !(xmin <= xmax);
  if (empty) {
    xmin = log_x ? 0.1 : 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmin == xmax) {
    xmin -= log_x ? 0.0 : 0.5;
    xmax += log_x ? 0.0 : 0.5;
    if (log_x) {
      xmin *= 0.5;
      xmax *= 2.0;
    }
  }
  if (ymin == ymax) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.04 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto tx = [&](double v) {
    const double a = log_x ? std::log10(xmin) : xmin;
    const double b = log_x ? std::log10(xmax) : xmax;
    const double u = log_x ? std::log10(v) : v;
    return left + (u - a) / (b - a) * (right - left);
  };
  auto ty = [&](double v) { return bottom - (v - ymin) / (ymax - ymin) * (bottom - top); };

  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << (left + right) / 2 << "\" y=\"26\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes, ticks, grid
  const int nticks = 5;
  for (int t = 0; t <= nticks; ++t) {
    const double fy = ymin + (ymax - ymin) * t / nticks;
    const double py = ty(fy);
    out << "<line x1=\"" << left << "\" y1=\"" << detail::svg_num(py) << "\" x2=\"" << right
        << "\" y2=\"" << detail::svg_num(py) << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << detail::svg_num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::tick_label(fy) << "</text>\n";
    double fx, px;
    if (log_x) {
      const double la = std::log10(xmin), lb = std::log10(xmax);
      fx = std::pow(10.0, la + (lb - la) * t / nticks);
    } else {
      fx = xmin + (xmax - xmin) * t / nticks;
    }
    px = tx(fx);
    out << "<line x1=\"" << detail::svg_num(px) << "\" y1=\"" << top << "\" x2=\""
        << detail::svg_num(px) << "\" y2=\"" << bottom << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << detail::svg_num(px) << "\" y=\"" << bottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::tick_label(fx) << "</text>\n";
  }
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
      << bottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
      << "</text>\n"
      << "<text x=\"20\" y=\"" << (top + bottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\""
      << "rotate(-90 20 " << (top + bottom) / 2 << ")\">" << ylabel << "</text>\n";

  // series: NaN (or nonpositive x under log) breaks the polyline
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = detail::series_color(si);
    std::vector<std::pair<double, double>> segment;
    auto flush = [&] {
      if (segment.size() == 1) {
        out << "<circle cx=\"" << detail::svg_num(segment[0].first) << "\" cy=\""
            << detail::svg_num(segment[0].second) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      } else if (segment.size() > 1) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& p : segment)
          out << detail::svg_num(p.first) << ',' << detail::svg_num(p.second) << ' ';
        out << "\"/>\n";
      }
      segment.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double xv = s.x[i], yv = s.y[i];
      const bool ok = std::isfinite(xv) && std::isfinite(yv) && (!log_x || xv > 0);
      if (!ok) {
        flush();
        continue;
      }
      segment.emplace_back(tx(xv), ty(yv));
    }
    flush();
    const double ly = top + 10 + 20.0 * static_cast<double>(si);
    out << "<line x1=\"" << right + 14 << "\" y1=\"" << detail::svg_num(ly) << "\" x2=\""
        << right + 40 << "\" y2=\"" << detail::svg_num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n"
        << "<text x=\"" << right + 46 << "\" y=\"" << detail::svg_num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
  }
  if (empty)
    out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << (top + bottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
        << "fill=\"#888\">no finite data</text>\n";
  out << "</svg>\n";
  if (!out) throw io_error("write failed on " + path);
}

inline void write_risk_curve_svg(const std::string& path, const RiskCurve& curve,
                                 const std::string& title, const std::string& xlabel,
                                 const std::string& ylabel, bool log_x) {
  std::vector<PlotSeries> plot;
  for (const Series& s : curve.series) {
    PlotSeries ps;
    ps.name = s.name;
    for (std::size_t i = 0; i < curve.grid_values.size(); ++i) {
      ps.x.push_back(curve.grid_values[i]);
      ps.y.push_back(s.points[i].mean);
    }
    plot.push_back(std::move(ps));
  }
  write_line_plot(path, title, xlabel, ylabel, plot, log_x);
}

}  // namespace lpreg
