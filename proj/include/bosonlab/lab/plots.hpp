#pragma once

// Static SVG line plots of a sweep: for every metric one file against N at
// the final snapshot time and one against t with a line per N.

#include <filesystem>
#include <string>
#include <vector>

#include "bosonlab/lab/sweep.hpp"

namespace bosonlab::lab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG document with axes, ticks and a legend.
std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series);

/// Metrics that get plotted, in sweep column order.
const std::vector<std::string>& plotted_metrics();

/// Writes <dir>/<metric>_vs_N.svg and <dir>/<metric>_vs_t.svg. Returns the
/// paths written; an empty report writes nothing and returns an empty list.
std::vector<std::filesystem::path> write_sweep_plots(const SweepReport& report, const std::filesystem::path& dir);

}  // namespace bosonlab::lab
