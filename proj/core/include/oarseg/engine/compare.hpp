#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oarseg/data/dataset_spec.hpp"
#include "oarseg/data/split.hpp"
#include "oarseg/metrics/report.hpp"

namespace oarseg {

/// Evaluation result of one run on one split.
struct RunSummary {
  std::string label;
  std::string run_name;
  DatasetName dataset = DatasetName::synthetic;
  SplitName split = SplitName::test;
  MetricsReport report;
};

/// Reads <run_dir>/config.json and <run_dir>/report_<split>.json.
RunSummary load_run_summary(const std::filesystem::path& run_dir, SplitName split, std::string label);

struct ComparisonTable {
  DatasetName dataset = DatasetName::synthetic;
  std::vector<std::string> organs;
  RunSummary baseline;
  RunSummary enhanced;
};

/// Throws DatasetMismatch when the runs were evaluated on different datasets and
/// ClassMismatch when their organ lists differ.
ComparisonTable compare(const RunSummary& baseline, const RunSummary& enhanced);

/// (enhanced - baseline) / baseline * 100; absent when baseline is zero.
std::optional<double> relative_gain(double baseline, double enhanced);

/// Columns: Organ, <baseline> DICE, <baseline> HD95, <enhanced> DICE, <enhanced> HD95,
/// DICE gain (%), HD95 reduction (%); organ rows then "Overall".
std::string to_csv(const ComparisonTable& t);
nlohmann::json to_json(const ComparisonTable& t);

}  // namespace oarseg
