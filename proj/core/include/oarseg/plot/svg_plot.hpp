#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oarseg/engine/run_files.hpp"
#include "oarseg/optim/scheduler.hpp"

namespace oarseg::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct Figure {
  std::string title;
  std::vector<Panel> panels;  // laid out left to right
};

struct Bar {
  std::string label;
  double value = 0.0;
};

struct LabeledCurves {
  std::string label;
  Curves curves;
};

struct LabeledTrace {
  std::string label;
  LrTrace trace;
};

/// Validation DICE and training loss against epoch, one series per run.
Figure curves_figure(const std::string& title, const std::vector<LabeledCurves>& runs);
/// Learning rate against iteration, one series per run.
Figure lr_figure(const std::string& title, const std::vector<LabeledTrace>& runs);

std::string render_svg(const Figure& fig, int panel_width = 480, int panel_height = 320);
std::string render_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars);

/// Reads curves.csv / lr_trace.csv / config.json from each run directory and writes
/// curves_<dataset>.svg per dataset plus lr_trace.svg into `out_dir`. Returns the files
/// written. Throws MissingCurves for an empty list or a run without curves.
std::vector<std::filesystem::path> plot_runs(const std::vector<std::filesystem::path>& run_dirs,
                                             const std::filesystem::path& out_dir);

}  // namespace oarseg::plot
