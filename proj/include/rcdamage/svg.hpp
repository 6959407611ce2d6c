#pragma once

#include <algorithm>
#include <cstdio>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rcdamage/io_formats.hpp"

// Minimal static line plots for reports (precision-recall and loss curves).

namespace rcdamage::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  bool step = false; // draw as a step function
};

inline std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string line_plot(const PlotOptions &plot, const std::vector<Series> &series) {
  constexpr double W = 640, H = 480, L = 80, R = 20, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  const double xr = plot.x_max > plot.x_min ? plot.x_max - plot.x_min : 1.0;
  const double yr = plot.y_max > plot.y_min ? plot.y_max - plot.y_min : 1.0;
  auto sx = [&](double x) { return L + (x - plot.x_min) / xr * pw; };
  auto sy = [&](double y) { return T + ph - (y - plot.y_min) / yr * ph; };

  static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
       escape(plot.title) + "</text>\n";
  s += "<rect x=\"" + fixed(L) + "\" y=\"" + fixed(T) + "\" width=\"" + fixed(pw) +
       "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = plot.x_min + xr * i / 5.0;
    const double fy = plot.y_min + yr * i / 5.0;
    s += "<text x=\"" + fixed(sx(fx)) + "\" y=\"" + fixed(T + ph + 18) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + io::format_number(fx) + "</text>\n";
    s += "<text x=\"" + fixed(L - 6) + "\" y=\"" + fixed(sy(fy) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + io::format_number(fy) + "</text>\n";
  }
  s += "<text x=\"" + fixed(L + pw / 2) + "\" y=\"" + fixed(H - 16) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + escape(plot.x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + fixed(T + ph / 2) +
       "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
       fixed(T + ph / 2) + ")\">" + escape(plot.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto &pts = series[k].points;
    if (pts.empty())
      continue;
    std::string poly;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (plot.step && i > 0)
        poly += fixed(sx(pts[i].first)) + "," + fixed(sy(pts[i - 1].second)) + " ";
      poly += fixed(sx(pts[i].first)) + "," + fixed(sy(pts[i].second)) + " ";
    }
    poly.pop_back();
    s += "<polyline fill=\"none\" stroke=\"" + std::string(colors[k % 5]) +
         "\" stroke-width=\"1.5\" points=\"" + poly + "\"/>\n";
    s += "<text x=\"" + fixed(L + pw - 8) + "\" y=\"" + fixed(T + 18 + 16.0 * k) +
         "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + colors[k % 5] + "\">" +
         escape(series[k].label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

} // namespace rcdamage::svg
