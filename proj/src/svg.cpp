#include "passat/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "passat/common.hpp"

namespace passat {

namespace {

constexpr double kWidth = 860.0, kHeight = 520.0;
constexpr double kLeft = 86.0, kRight = 830.0, kTop = 56.0, kBottom = 452.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

bool usable(double v, bool log_scale) {
  if (!std::isfinite(v)) return false;
  return !log_scale || v > 0.0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<PlotSeries>& series,
                             bool log_x, bool log_y) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], log_x) || !usable(s.y[i], log_y)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  const bool empty = !(xmin <= xmax) || !(ymin <= ymax);
  if (empty) {
    xmin = log_x ? 1.0 : 0.0;
    xmax = log_x ? 10.0 : 1.0;
    ymin = log_y ? 1.0 : 0.0;
    ymax = log_y ? 10.0 : 1.0;
  }
  auto span_fix = [](double& lo, double& hi, bool log_scale) {
    if (log_scale) {
      lo = std::log10(lo);
      hi = std::log10(hi);
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  };
  span_fix(xmin, xmax, log_x);
  span_fix(ymin, ymax, log_y);

  const auto map_x = [&](double v) {
    const double t = ((log_x ? std::log10(v) : v) - xmin) / (xmax - xmin);
    return kLeft + t * (kRight - kLeft);
  };
  const auto map_y = [&](double v) {
    const double t = ((log_y ? std::log10(v) : v) - ymin) / (ymax - ymin);
    return kBottom - t * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << (kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"17\">" << escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << (kRight - kLeft)
      << "\" height=\"" << (kBottom - kTop)
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  // Ticks: decades on log axes, five even divisions otherwise.
  const auto axis_ticks = [&](double lo, double hi, bool log_scale) {
    std::vector<double> t;
    if (log_scale) {
      for (int d = static_cast<int>(std::ceil(lo)); d <= static_cast<int>(std::floor(hi)); ++d) {
        t.push_back(std::pow(10.0, d));
      }
      if (t.size() < 2) {
        for (int i = 0; i <= 4; ++i) t.push_back(std::pow(10.0, lo + (hi - lo) * i / 4.0));
      }
    } else {
      for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5.0);
    }
    return t;
  };
  for (double v : axis_ticks(xmin, xmax, log_x)) {
    const double px = map_x(v);
    if (px < kLeft - 0.5 || px > kRight + 0.5) continue;
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt(px) << "\" y2=\""
        << (kBottom + 6) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << fmt(px) << "\" y=\"" << (kBottom + 22)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(v) << "</text>\n";
  }
  for (double v : axis_ticks(ymin, ymax, log_y)) {
    const double py = map_y(v);
    if (py < kTop - 0.5 || py > kBottom + 0.5) continue;
    svg << "<line x1=\"" << (kLeft - 6) << "\" y1=\"" << fmt(py) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fmt(py) << "\" stroke=\"#333\"/>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py) << "\" x2=\"" << kRight << "\" y2=\""
        << fmt(py) << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    svg << "<text x=\"" << (kLeft - 10) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(v)
        << "</text>\n";
  }
  svg << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\"" << (kHeight - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << ((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(-90 20 " << ((kTop + kBottom) / 2) << ")\">" << escape(y_label)
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::vector<std::string> segments;
    std::string cur;
    int pts = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], log_x) || !usable(s.y[i], log_y)) {
        if (pts >= 2) segments.push_back(cur);
        cur.clear();
        pts = 0;
        continue;
      }
      cur += fmt(map_x(s.x[i])) + "," + fmt(map_y(s.y[i])) + " ";
      ++pts;
    }
    if (pts >= 2) segments.push_back(cur);
    for (const auto& seg : segments) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
      if (s.dashed) svg << " stroke-dasharray=\"7 5\"";
      svg << " points=\"" << seg << "\"/>\n";
    }
    // point markers help when a series has isolated valid samples
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], log_x) || !usable(s.y[i], log_y)) continue;
      svg << "<circle cx=\"" << fmt(map_x(s.x[i])) << "\" cy=\"" << fmt(map_y(s.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 18 + 20 * static_cast<double>(si);
    svg << "<line x1=\"" << (kRight - 150) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
        << (kRight - 120) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"7 5\"" : "") << "/>\n";
    svg << "<text x=\"" << (kRight - 112) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace passat
