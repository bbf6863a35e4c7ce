#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "hos/error.hpp"
#include "hos/report.hpp"

// Minimal static SVG rendering: multi-series line charts and value heatmaps.
// Self-contained documents, no scripts, no interactivity.

namespace hos {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

namespace svg_detail {

constexpr int kWidth = 720, kHeight = 480;
constexpr int kMarginL = 70, kMarginR = 24, kMarginT = 40, kMarginB = 56;

inline const char* series_color(size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % 8];
}

inline std::string fmt_tick(double v) {
  char buf[32];
  if (v != 0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3))
    std::snprintf(buf, sizeof(buf), "%.2e", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
  double map(double v, double pix_lo, double pix_hi) const {
    const double t = (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

inline Axis fit_axis(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad};
}

inline void emit_frame(std::ostringstream& out, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel, const Axis& xa,
                       const Axis& ya) {
  out << "<rect x='" << kMarginL << "' y='" << kMarginT << "' width='"
      << kWidth - kMarginL - kMarginR << "' height='" << kHeight - kMarginT - kMarginB
      << "' fill='none' stroke='#444'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
  out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='12'>" << xlabel << "</text>\n";
  out << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' font-size='12' "
      << "transform='rotate(-90 16 " << kHeight / 2 << ")'>" << ylabel << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xa.lo + (xa.hi - xa.lo) * t / 4;
    const double px = xa.map(fx, kMarginL, kWidth - kMarginR);
    out << "<line x1='" << px << "' y1='" << kHeight - kMarginB << "' x2='" << px << "' y2='"
        << kHeight - kMarginB + 5 << "' stroke='#444'/>\n";
    out << "<text x='" << px << "' y='" << kHeight - kMarginB + 18
        << "' text-anchor='middle' font-size='11'>" << fmt_tick(fx) << "</text>\n";
    const double fy = ya.lo + (ya.hi - ya.lo) * t / 4;
    const double py = ya.map(fy, kHeight - kMarginB, kMarginT);
    out << "<line x1='" << kMarginL - 5 << "' y1='" << py << "' x2='" << kMarginL << "' y2='" << py
        << "' stroke='#444'/>\n";
    out << "<text x='" << kMarginL - 8 << "' y='" << py + 4
        << "' text-anchor='end' font-size='11'>" << fmt_tick(fy) << "</text>\n";
  }
}

}  // namespace svg_detail

inline std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                                  const std::string& xlabel, const std::string& ylabel) {
  using namespace svg_detail;
  if (series.empty()) throw InvalidArgument("line chart needs at least one series");
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size())
      throw InvalidArgument("line chart series must be nonempty and consistent");
    for (double v : s.x) {
      xlo = std::min(xlo, v);
      xhi = std::max(xhi, v);
    }
    for (double v : s.y) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  }
  const Axis xa = fit_axis(xlo, xhi), ya = fit_axis(ylo, yhi);

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  emit_frame(out, title, xlabel, ylabel, xa, ya);
  for (size_t i = 0; i < series.size(); ++i) {
    out << "<polyline fill='none' stroke='" << series_color(i) << "' stroke-width='1.6' points='";
    for (size_t k = 0; k < series[i].x.size(); ++k) {
      out << xa.map(series[i].x[k], kMarginL, kWidth - kMarginR) << ','
          << ya.map(series[i].y[k], kHeight - kMarginB, kMarginT) << ' ';
    }
    out << "'/>\n";
    out << "<text x='" << kWidth - kMarginR - 6 << "' y='" << kMarginT + 16 + 16 * i
        << "' text-anchor='end' font-size='12' fill='" << series_color(i) << "'>"
        << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Heatmap over a rectangular (x, y) grid, NaN cells hatched grey, optional
// marker at the minimum.
inline std::string svg_heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<std::vector<double>>& values,  // [x][y]
                               const std::string& title, const std::string& xlabel,
                               const std::string& ylabel, bool mark_min = true) {
  using namespace svg_detail;
  if (xs.empty() || ys.empty() || values.size() != xs.size())
    throw InvalidArgument("heatmap grid is inconsistent");
  for (const auto& col : values)
    if (col.size() != ys.size()) throw InvalidArgument("heatmap grid is inconsistent");

  double lo = 1e300, hi = -1e300;
  for (const auto& col : values)
    for (double v : col)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(hi >= lo)) throw InvalidArgument("heatmap has no finite cells");
  const double spanx = xs.size() > 1 ? xs[1] - xs[0] : 1.0;
  const double spany = ys.size() > 1 ? ys[1] - ys[0] : 1.0;
  const Axis xa = fit_axis(xs.front() - spanx / 2, xs.back() + spanx / 2);
  const Axis ya = fit_axis(ys.front() - spany / 2, ys.back() + spany / 2);

  auto color_of = [&](double v) {
    // log ramp, dark blue (small) to yellow (large)
    const double llo = std::log10(std::max(lo, 1e-300));
    const double lhi = std::log10(std::max(hi, 1e-299));
    double t = (lhi > llo) ? (std::log10(v) - llo) / (lhi - llo) : 0.5;
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(40 + 215 * t);
    const int g = static_cast<int>(40 + 180 * t);
    const int b = static_cast<int>(140 - 100 * t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";

  size_t bi = 0, bj = 0;
  double best = 1e300;
  for (size_t i = 0; i < xs.size(); ++i) {
    for (size_t j = 0; j < ys.size(); ++j) {
      const double v = values[i][j];
      const double x0 = xa.map(xs[i] - spanx / 2, kMarginL, kWidth - kMarginR);
      const double x1 = xa.map(xs[i] + spanx / 2, kMarginL, kWidth - kMarginR);
      const double y0 = ya.map(ys[j] + spany / 2, kHeight - kMarginB, kMarginT);
      const double y1 = ya.map(ys[j] - spany / 2, kHeight - kMarginB, kMarginT);
      const std::string fill = std::isfinite(v) ? color_of(v) : "#bbb";
      out << "<rect x='" << x0 << "' y='" << y0 << "' width='" << x1 - x0 << "' height='"
          << y1 - y0 << "' fill='" << fill << "'/>\n";
      if (std::isfinite(v) && v < best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  emit_frame(out, title, xlabel, ylabel, xa, ya);
  if (mark_min) {
    const double px = xa.map(xs[bi], kMarginL, kWidth - kMarginR);
    const double py = ya.map(ys[bj], kHeight - kMarginB, kMarginT);
    out << "<circle cx='" << px << "' cy='" << py
        << "' r='6' fill='none' stroke='black' stroke-width='2'/>\n"
        << "<line x1='" << px - 9 << "' y1='" << py << "' x2='" << px + 9 << "' y2='" << py
        << "' stroke='black' stroke-width='1.5'/>\n"
        << "<line x1='" << px << "' y1='" << py - 9 << "' x2='" << px << "' y2='" << py + 9
        << "' stroke='black' stroke-width='1.5'/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hos
