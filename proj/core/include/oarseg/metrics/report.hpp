#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oarseg/data/volume.hpp"

namespace oarseg {

struct ClassRecord {
  std::string organ;
  double dice = 0.0;
  std::optional<double> hd95_mm;  // absent when prediction or reference is empty
};

using CaseRecord = std::vector<ClassRecord>;

/// One record per foreground class. Throws ClassMismatch when class lists differ.
CaseRecord evaluate_case(const LabelMap& pred, const LabelMap& ref, const Spacing& spacing,
                         bool with_hd95 = true);

struct OrganSummary {
  double dice = 0.0;
  std::optional<double> hd95_mm;
  std::size_t hd95_cases = 0;  // cases that contributed to hd95_mm
};

struct MetricsReport {
  std::vector<std::string> organs;  // row order
  std::map<std::string, OrganSummary> per_class;
  double overall_dice = 0.0;
  std::optional<double> overall_hd95_mm;
  std::size_t n_cases = 0;

  const OrganSummary& at(const std::string& organ) const;
};

/// Per-class means over cases (absent HD95 entries excluded); overall = mean of the
/// per-class means. Throws EmptyInput / ClassMismatch.
MetricsReport aggregate(const std::vector<CaseRecord>& cases);

/// Reorders the rows of `r` (e.g. into a published table order).
MetricsReport reorder(MetricsReport r, const std::vector<std::string>& organs);

nlohmann::json to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::json& j);

/// Table layout: "Organ,DICE,HD95" then one row per organ and an "Overall" row,
/// two decimals, "NA" for absent HD95.
std::string to_csv(const MetricsReport& r);

void write_report(const std::filesystem::path& stem, const MetricsReport& r);  // <stem>.json and <stem>.csv
MetricsReport read_report(const std::filesystem::path& json_path);

std::string format_fixed(double v, int decimals = 2);

}  // namespace oarseg
