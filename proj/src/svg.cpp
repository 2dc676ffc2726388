#include "descspace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace descspace::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 620.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 436.0;

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  bool seen = false;

  void include(double v) {
    if (!std::isfinite(v)) return;
    if (!seen) {
      lo = hi = v;
      seen = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  void finalize() {
    if (!seen) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

std::string coord(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::string tick_text(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v + 0.0);  // avoid -0
  return buffer;
}

double tick_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  if (norm < 1.5) return mag;
  if (norm < 3.5) return 2.0 * mag;
  if (norm < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '&') {
      out += "&amp;";
    } else if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string render(const Chart& chart) {
  Range rx, ry;
  for (const Series* s : {&chart.scatter, &chart.circles, &chart.line}) {
    for (double v : s->x) rx.include(v);
    for (double v : s->y) ry.include(v);
  }
  for (std::size_t i = 0; i < chart.bar_lo.size(); ++i) {
    rx.include(chart.bar_lo[i]);
    rx.include(chart.bar_lo[i] + chart.bar_width);
    ry.include(0.0);
    ry.include(chart.bar_count[i]);
  }
  for (double v : chart.marks) rx.include(v);
  rx.finalize();
  ry.finalize();

  const auto px = [&](double v) {
    return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * (kRight - kLeft);
  };
  const auto py = [&](double v) {
    return kBottom - (v - ry.lo) / (ry.hi - ry.lo) * (kBottom - kTop);
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         coord(kWidth) + "\" height=\"" + coord(kHeight) + "\" viewBox=\"0 0 " +
         coord(kWidth) + " " + coord(kHeight) + "\">\n";
  out += "<rect width=\"" + coord(kWidth) + "\" height=\"" + coord(kHeight) +
         "\" fill=\"#ffffff\"/>\n";

  const double sx = tick_step(rx.hi - rx.lo);
  const double sy = tick_step(ry.hi - ry.lo);
  for (double t = std::ceil(rx.lo / sx) * sx; t <= rx.hi + 1e-9 * sx; t += sx) {
    const std::string x = coord(px(t));
    out += "<line x1=\"" + x + "\" y1=\"" + coord(kBottom) + "\" x2=\"" + x +
           "\" y2=\"" + coord(kBottom + 5) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + x + "\" y=\"" + coord(kBottom + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">" +
           tick_text(t) + "</text>\n";
  }
  for (double t = std::ceil(ry.lo / sy) * sy; t <= ry.hi + 1e-9 * sy; t += sy) {
    const std::string y = coord(py(t));
    out += "<line x1=\"" + coord(kLeft - 5) + "\" y1=\"" + y + "\" x2=\"" +
           coord(kLeft) + "\" y2=\"" + y +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(py(t) + 3.5) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">" +
           tick_text(t) + "</text>\n";
  }

  for (std::size_t i = 0; i < chart.bar_lo.size(); ++i) {
    const double x0 = px(chart.bar_lo[i]);
    const double x1 = px(chart.bar_lo[i] + chart.bar_width);
    const double y1 = py(chart.bar_count[i]);
    out += "<rect x=\"" + coord(x0) + "\" y=\"" + coord(y1) + "\" width=\"" +
           coord(x1 - x0) + "\" height=\"" + coord(py(0.0) - y1) +
           "\" fill=\"#8aa9c9\" stroke=\"#5b7da1\" stroke-width=\"0.5\"/>\n";
  }

  for (std::size_t i = 0; i < chart.scatter.x.size(); ++i) {
    out += "<circle cx=\"" + coord(px(chart.scatter.x[i])) + "\" cy=\"" +
           coord(py(chart.scatter.y[i])) +
           "\" r=\"1.6\" fill=\"#9a9a9a\" fill-opacity=\"0.55\"/>\n";
  }

  if (chart.line.x.size() > 1) {
    out += "<polyline fill=\"none\" stroke=\"#1f6fc4\" stroke-width=\"1.8\" "
           "points=\"";
    for (std::size_t i = 0; i < chart.line.x.size(); ++i) {
      if (i) out += ' ';
      out += coord(px(chart.line.x[i])) + "," + coord(py(chart.line.y[i]));
    }
    out += "\"/>\n";
  } else if (chart.line.x.size() == 1) {
    out += "<circle cx=\"" + coord(px(chart.line.x[0])) + "\" cy=\"" +
           coord(py(chart.line.y[0])) + "\" r=\"2.5\" fill=\"#1f6fc4\"/>\n";
  }

  for (std::size_t i = 0; i < chart.circles.x.size(); ++i) {
    out += "<circle cx=\"" + coord(px(chart.circles.x[i])) + "\" cy=\"" +
           coord(py(chart.circles.y[i])) +
           "\" r=\"3.2\" fill=\"none\" stroke=\"#000000\" "
           "stroke-width=\"1.1\"/>\n";
  }

  for (double m : chart.marks) {
    const std::string x = coord(px(m));
    out += "<line x1=\"" + x + "\" y1=\"" + coord(kTop) + "\" x2=\"" + x +
           "\" y2=\"" + coord(kBottom) +
           "\" stroke=\"#c43f3f\" stroke-width=\"1.4\" "
           "stroke-dasharray=\"5,4\"/>\n";
  }

  out += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kTop) + "\" x2=\"" +
         coord(kLeft) + "\" y2=\"" + coord(kBottom) +
         "\" stroke=\"#000000\" stroke-width=\"1.2\"/>\n";
  out += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kBottom) +
         "\" x2=\"" + coord(kRight) + "\" y2=\"" + coord(kBottom) +
         "\" stroke=\"#000000\" stroke-width=\"1.2\"/>\n";

  if (!chart.title.empty()) {
    out += "<text x=\"" + coord((kLeft + kRight) / 2) + "\" y=\"18\" "
           "font-family=\"sans-serif\" font-size=\"14\" "
           "text-anchor=\"middle\">" +
           escape(chart.title) + "</text>\n";
  }
  if (!chart.x_label.empty()) {
    out += "<text x=\"" + coord((kLeft + kRight) / 2) + "\" y=\"" +
           coord(kHeight - 10) +
           "\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\">" +
           escape(chart.x_label) + "</text>\n";
  }
  if (!chart.y_label.empty()) {
    out += "<text x=\"16\" y=\"" + coord((kTop + kBottom) / 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           coord((kTop + kBottom) / 2) + ")\">" +
           escape(chart.y_label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace descspace::svg
