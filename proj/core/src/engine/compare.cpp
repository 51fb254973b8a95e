#include "oarseg/engine/compare.hpp"

#include "oarseg/engine/run_files.hpp"
#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

std::string cell(const std::optional<double>& v) { return v ? format_fixed(*v) : "NA"; }

std::optional<double> hd95_reduction(const std::optional<double>& base, const std::optional<double>& enh) {
  if (!base || !enh || *base == 0.0) return std::nullopt;
  return (*base - *enh) / *base * 100.0;
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

RunSummary load_run_summary(const std::filesystem::path& run_dir, SplitName split, std::string label) {
  const RunPaths paths{run_dir};
  RunSummary s;
  s.label = std::move(label);
  s.run_name = run_dir.filename().string();
  s.split = split;
  try {
    const auto cfg = nlohmann::json::parse(read_text(paths.config()));
    s.dataset = dataset_name_from_string(cfg.at("dataset").at("name").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(paths.config().string() + ": " + e.what());
  }
  if (!std::filesystem::exists(paths.report_json(split))) {
    throw FormatError("no " + std::string(to_string(split)) + " report in " + run_dir.string() +
                      " (run `oarseg evaluate` first)");
  }
  s.report = read_report(paths.report_json(split));
  return s;
}

ComparisonTable compare(const RunSummary& baseline, const RunSummary& enhanced) {
  if (baseline.dataset != enhanced.dataset) {
    throw DatasetMismatch("cannot compare a " + std::string(to_string(baseline.dataset)) + " run with a " +
                          std::string(to_string(enhanced.dataset)) + " run");
  }
  if (baseline.report.organs != enhanced.report.organs) throw ClassMismatch("the runs report different organs");
  return ComparisonTable{baseline.dataset, baseline.report.organs, baseline, enhanced};
}

std::optional<double> relative_gain(double baseline, double enhanced) {
  if (baseline == 0.0) return std::nullopt;
  return (enhanced - baseline) / baseline * 100.0;
}

std::string to_csv(const ComparisonTable& t) {
  const auto& b = t.baseline.label;
  const auto& e = t.enhanced.label;
  std::string out = "Organ," + b + " DICE," + b + " HD95," + e + " DICE," + e + " HD95,DICE gain (%),HD95 reduction (%)\n";
  auto row = [&](const std::string& name, double bd, const std::optional<double>& bh, double ed,
                 const std::optional<double>& eh) {
    out += name + "," + format_fixed(bd) + "," + cell(bh) + "," + format_fixed(ed) + "," + cell(eh) + "," +
           cell(relative_gain(bd, ed)) + "," + cell(hd95_reduction(bh, eh)) + "\n";
  };
  for (const auto& organ : t.organs) {
    const auto& bo = t.baseline.report.at(organ);
    const auto& eo = t.enhanced.report.at(organ);
    row(organ, bo.dice, bo.hd95_mm, eo.dice, eo.hd95_mm);
  }
  row("Overall", t.baseline.report.overall_dice, t.baseline.report.overall_hd95_mm, t.enhanced.report.overall_dice,
      t.enhanced.report.overall_hd95_mm);
  return out;
}

nlohmann::json to_json(const ComparisonTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  auto row = [&](const std::string& name, double bd, const std::optional<double>& bh, double ed,
                 const std::optional<double>& eh) {
    rows.push_back({{"organ", name},
                    {"baseline", {{"dice", bd}, {"hd95_mm", opt_json(bh)}}},
                    {"enhanced", {{"dice", ed}, {"hd95_mm", opt_json(eh)}}},
                    {"dice_gain_pct", opt_json(relative_gain(bd, ed))},
                    {"hd95_reduction_pct", opt_json(hd95_reduction(bh, eh))}});
  };
  for (const auto& organ : t.organs) {
    const auto& bo = t.baseline.report.at(organ);
    const auto& eo = t.enhanced.report.at(organ);
    row(organ, bo.dice, bo.hd95_mm, eo.dice, eo.hd95_mm);
  }
  row("Overall", t.baseline.report.overall_dice, t.baseline.report.overall_hd95_mm, t.enhanced.report.overall_dice,
      t.enhanced.report.overall_hd95_mm);
  return {{"dataset", std::string(to_string(t.dataset))},
          {"split", std::string(to_string(t.baseline.split))},
          {"baseline", {{"label", t.baseline.label}, {"run", t.baseline.run_name}}},
          {"enhanced", {{"label", t.enhanced.label}, {"run", t.enhanced.run_name}}},
          {"rows", rows}};
}

}  // namespace oarseg
