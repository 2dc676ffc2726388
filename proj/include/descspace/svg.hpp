#pragma once

#include <string>
#include <vector>

namespace descspace::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

/// One chart's worth of layered content.  Any layer may be empty; an entirely
/// empty chart still renders its axes.  Output bytes are a pure function of
/// the input, so identical charts are byte-identical files.
struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  Series scatter;   // small gray dots (random surveys)
  Series circles;   // open black circles (subsystems)
  Series line;      // blue trace (optimized boundary)
  std::vector<double> bar_lo;  // histogram bin left edges
  std::vector<double> bar_count;
  double bar_width = 0.0;
  std::vector<double> marks;   // vertical dashed reference lines
};

std::string render(const Chart& chart);

}  // namespace descspace::svg
