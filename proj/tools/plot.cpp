#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace manifold_descent::cli {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double left = 70.0;
  const double right = 170.0;
  const double top = 40.0;
  const double bottom = 50.0;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  auto ty = [&](double y) {
    if (!opt.log_y) return y;
    return std::log10(std::max(y, 1e-300));
  };

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << escape(opt.title) << "</text>\n";
  }
  os << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw)
     << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = xmin + (xmax - xmin) * i / kTicks;
    const double yv = ymin + (ymax - ymin) * i / kTicks;
    os << "<line x1=\"" << fixed(px(xv)) << "\" y1=\"" << fixed(top + ph) << "\" x2=\""
       << fixed(px(xv)) << "\" y2=\"" << fixed(top + ph + 5) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(top + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(xv) << "</text>\n";
    os << "<line x1=\"" << fixed(left - 5) << "\" y1=\"" << fixed(py(yv)) << "\" x2=\""
       << fixed(left) << "\" y2=\"" << fixed(py(yv)) << "\" stroke=\"#333\"/>\n";
    const std::string ylab = opt.log_y ? "1e" + tick_label(yv) : tick_label(yv);
    os << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(py(yv) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << ylab
       << "</text>\n";
  }
  os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(opt.height - 12.0)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape(opt.x_label) << "</text>\n";
  const std::string ytitle = opt.log_y ? opt.y_label + " (log10)" : opt.y_label;
  os << "<text x=\"16\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << fixed(top + ph / 2) << ")\">" << escape(ytitle) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      if (!first) os << ' ';
      os << fixed(px(s.x[i])) << ',' << fixed(py(y));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << fixed(left + pw + 12) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
       << fixed(left + pw + 32) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fixed(left + pw + 36) << "\" y=\"" << fixed(ly)
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

PlotSeries objective_series(const Trajectory& traj, const std::string& label, bool log_y) {
  PlotSeries s;
  s.label = label;
  // Thin to at most ~2000 vertices, always keeping the last sample.
  const std::size_t n = traj.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + 1999) / 2000);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % stride != 0 && i + 1 != n) continue;
    s.x.push_back(traj.times[i]);
    s.y.push_back(log_y ? traj.f_vals[i] - traj.f_star : traj.f_vals[i]);
  }
  return s;
}

}  // namespace manifold_descent::cli
