#pragma once

// Self-contained SVG renderings of diagrams, landscapes, trajectories,
// episode traces and sweep summaries. Output depends only on the input.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "t2nav/core.hpp"
#include "t2nav/diagram_metrics.hpp"
#include "t2nav/io.hpp"
#include "t2nav/topology.hpp"

namespace t2nav::plot {

class Svg {
 public:
  Svg(int width, int height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    body_ += "<line x1=\"" + f(x1) + "\" y1=\"" + f(y1) + "\" x2=\"" + f(x2) + "\" y2=\"" + f(y2) + "\" " + style + "/>\n";
  }
  void circle(double cx, double cy, double r, const std::string& style) {
    body_ += "<circle cx=\"" + f(cx) + "\" cy=\"" + f(cy) + "\" r=\"" + f(r) + "\" " + style + "/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& style) {
    body_ += "<rect x=\"" + f(x) + "\" y=\"" + f(y) + "\" width=\"" + f(w) + "\" height=\"" + f(h) + "\" " + style + "/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    if (pts.empty()) return;
    body_ += "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ += (i ? " " : "") + f(pts[i].first) + "," + f(pts[i].second);
    body_ += "\" " + style + "/>\n";
  }
  void text(double x, double y, const std::string& s, const std::string& style = "font-size=\"12\"") {
    body_ += "<text x=\"" + f(x) + "\" y=\"" + f(y) + "\" " + style + ">" + s + "</text>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
           std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  static std::string f(double v) { return format_fixed(v, 2); }

  int width_;
  int height_;
  std::string body_;
};

// Maps data coordinates into a square plot area with a margin.
struct Frame {
  double x0, x1, y0, y1;
  double left = 50, top = 20, size = 360;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * size; }
  double py(double y) const { return top + size - (y - y0) / (y1 - y0) * size; }

  void axes(Svg& svg, const std::string& xlabel, const std::string& ylabel) const {
    svg.line(px(x0), py(y0), px(x1), py(y0), "stroke=\"black\"");
    svg.line(px(x0), py(y0), px(x0), py(y1), "stroke=\"black\"");
    svg.text(px(x0), py(y0) + 16, format_fixed(x0, 2));
    svg.text(px(x1) - 20, py(y0) + 16, format_fixed(x1, 2));
    svg.text(px(x0) - 45, py(y1) + 4, format_fixed(y1, 2));
    svg.text(left + size / 2 - 20, py(y0) + 32, xlabel);
    svg.text(4, top + size / 2, ylabel);
  }
};

inline std::string diagram_svg(const PersistenceDiagram& pd) {
  double hi = 1.0;
  for (const auto& p : pd.dim1) hi = std::max(hi, p.death);
  for (const auto& p : pd.dim0)
    if (!p.essential()) hi = std::max(hi, p.death);
  Svg svg(440, 420);
  Frame fr{0.0, hi, 0.0, hi};
  fr.axes(svg, "birth", "death");
  svg.line(fr.px(0), fr.py(0), fr.px(hi), fr.py(hi), "stroke=\"gray\" stroke-dasharray=\"4,3\"");
  for (const auto& p : pd.dim0)
    if (!p.essential()) svg.circle(fr.px(p.birth), fr.py(p.death), 3, "fill=\"steelblue\"");
  for (const auto& p : pd.dim1) svg.circle(fr.px(p.birth), fr.py(p.death), 4, "fill=\"crimson\"");
  return svg.str();
}

inline std::string landscape_svg(const Landscape& l) {
  double hi = 0.5;
  for (double v : l.values) hi = std::max(hi, v);
  Svg svg(440, 420);
  Frame fr{0.0, std::max(l.eps_max, 1e-9), 0.0, hi};
  fr.axes(svg, "t", "value");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < l.values.size(); ++i) pts.emplace_back(fr.px(l.position(i)), fr.py(l.values[i]));
  svg.polyline(pts, "fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\"");
  return svg.str();
}

inline std::string trajectory_svg(const Trajectory& traj) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!traj.empty()) {
    x0 = x1 = traj[0].pose.x();
    y0 = y1 = traj[0].pose.y();
    for (const auto& p : traj.points()) {
      x0 = std::min(x0, p.pose.x());
      x1 = std::max(x1, p.pose.x());
      y0 = std::min(y0, p.pose.y());
      y1 = std::max(y1, p.pose.y());
    }
  }
  const double span = std::max({x1 - x0, y1 - y0, 1.0});
  Svg svg(440, 420);
  Frame fr{x0 - 0.05 * span, x0 + 1.05 * span, y0 - 0.05 * span, y0 + 1.05 * span};
  fr.axes(svg, "x [m]", "y [m]");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : traj.points()) pts.emplace_back(fr.px(p.pose.x()), fr.py(p.pose.y()));
  svg.polyline(pts, "fill=\"none\" stroke=\"navy\" stroke-width=\"1.5\"");
  return svg.str();
}

/// Episode trace: occupancy grid, trajectory, blacklist circles and goal.
/// Rows are drawn top-down, matching the world file.
inline std::string trace_svg(const nlohmann::json& trace) {
  const auto rows = trace.at("grid").get<std::vector<std::string>>();
  const double res = trace.at("resolution").get<double>();
  const int h = static_cast<int>(rows.size());
  const int w = h > 0 ? static_cast<int>(rows.front().size()) : 0;
  const double cell = 400.0 / std::max({w, h, 1});
  Svg svg(static_cast<int>(std::ceil(w * cell)) + 20, static_cast<int>(std::ceil(h * cell)) + 20);
  auto px = [&](double x) { return 10 + x / res * cell; };
  auto py = [&](double y) { return 10 + y / res * cell; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (rows[y][x] == '#') svg.rect(10 + x * cell, 10 + y * cell, cell, cell, "fill=\"#444\"");
  for (const auto& b : trace.at("blacklist"))
    svg.circle(px(b.at("center").at(0).get<double>()), py(b.at("center").at(1).get<double>()),
               b.at("radius").get<double>() / res * cell, "fill=\"orange\" fill-opacity=\"0.3\" stroke=\"orange\"");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : trace.at("trajectory")) pts.emplace_back(px(p.at(1).get<double>()), py(p.at(2).get<double>()));
  svg.polyline(pts, "fill=\"none\" stroke=\"navy\" stroke-width=\"1.5\"");
  const auto& g = trace.at("goal");
  svg.circle(px(g.at(0).get<double>()), py(g.at(1).get<double>()), 5, "fill=\"green\"");
  return svg.str();
}

/// Bar chart of SR and SPL per ablation from the summary records of a results file.
inline std::string results_svg(const std::vector<nlohmann::json>& summaries) {
  Svg svg(440, 420);
  Frame fr{0.0, static_cast<double>(std::max<std::size_t>(summaries.size(), 1)), 0.0, 100.0};
  fr.axes(svg, "ablation", "percent");
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const double sr = summaries[i].at("SR").get<double>(), spl = summaries[i].at("SPL").get<double>();
    const double x = static_cast<double>(i);
    svg.rect(fr.px(x + 0.15), fr.py(sr), fr.px(x + 0.5) - fr.px(x + 0.15), fr.py(0) - fr.py(sr), "fill=\"steelblue\"");
    svg.rect(fr.px(x + 0.5), fr.py(spl), fr.px(x + 0.85) - fr.px(x + 0.5), fr.py(0) - fr.py(spl), "fill=\"crimson\"");
    svg.text(fr.px(x + 0.15), fr.py(0) + 28, summaries[i].at("ablation").get<std::string>(), "font-size=\"10\"");
  }
  return svg.str();
}

}  // namespace t2nav::plot
