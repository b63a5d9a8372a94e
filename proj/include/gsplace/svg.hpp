#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "gsplace/netlist.hpp"

namespace gsplace {

struct SvgOptions {
  double width_px = 800.0;
  std::string fixed_color = "#d62728";
  std::string movable_color = "#1f77b4";
  /// Side of the marker drawn for zero-size I/O pins, in pixels.
  double pin_marker_px = 4.0;
};

namespace svg_detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}
}  // namespace svg_detail

/// Placement render: region outline, then one rect per instance (fixed in red,
/// movable in blue). Output depends only on the inputs.
inline std::string render_placement_svg(const Netlist& nl, const std::vector<Point>& lower_left,
                                        const SvgOptions& opt = {}) {
  using svg_detail::num;
  const Region& r = nl.region();
  const double s = opt.width_px / r.width();
  const double H = r.height() * s;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(opt.width_px) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(opt.width_px) + " " + num(H) + "\">\n";
  out += "<rect class=\"region\" x=\"0.000\" y=\"0.000\" width=\"" + num(opt.width_px) + "\" height=\"" + num(H) +
         "\" fill=\"white\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    double w = inst.width * s, h = inst.height * s;
    double x = (lower_left[i].x - r.xmin) * s;
    double y = H - (lower_left[i].y - r.ymin) * s - h;  // SVG y grows downward
    if (inst.kind == InstanceKind::kIoPin && w * h == 0.0) {
      x -= 0.5 * opt.pin_marker_px;
      y -= 0.5 * opt.pin_marker_px;
      w = h = opt.pin_marker_px;
    }
    const bool fixed = inst.fixed();
    out += "<rect class=\"" + std::string(fixed ? "fixed" : "movable") + "\" x=\"" + num(x) + "\" y=\"" + num(y) +
           "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"" +
           (fixed ? opt.fixed_color : opt.movable_color) + "\" fill-opacity=\"" + (fixed ? "0.6" : "0.5") +
           "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x, y;
};

/// Minimal line chart with axis ranges taken from the data.
inline std::string render_line_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                                    const std::string& y_label) {
  using svg_detail::num;
  const double W = 640, H = 400, ml = 70, mr = 20, mt = 20, mb = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!any) x0 = x1 = s.x[i], y0 = y1 = s.y[i], any = true;
      x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]), y1 = std::max(y1, s.y[i]);
    }
  if (x1 <= x0) x0 -= 0.5, x1 += 0.5;
  if (y1 <= y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) + "\" y2=\"" + num(H - mb) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" + num(H - mb) +
         "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + num(0.5 * W) + "\" y=\"" + num(H - 10) + "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  out += "<text x=\"15\" y=\"" + num(0.5 * H) + "\" transform=\"rotate(-90 15 " + num(0.5 * H) +
         ")\" text-anchor=\"middle\">" + y_label + "</text>\n";
  for (double v : {x0, x1})
    out += "<text x=\"" + num(px(v)) + "\" y=\"" + num(H - mb + 18) + "\" text-anchor=\"middle\">" + num(v) + "</text>\n";
  for (double v : {y0, y1})
    out += "<text x=\"" + num(ml - 5) + "\" y=\"" + num(py(v)) + "\" text-anchor=\"end\">" + num(v) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) pts += (i ? " " : "") + num(px(s.x[i])) + "," + num(py(s.y[i]));
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + num(W - mr - 150) + "\" y=\"" + num(mt + 15 + 18.0 * k) + "\" fill=\"" + s.color + "\">" +
           s.label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gsplace
