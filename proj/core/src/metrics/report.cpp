#include "oarseg/metrics/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oarseg/metrics/overlap.hpp"

namespace oarseg {

CaseRecord evaluate_case(const LabelMap& pred, const LabelMap& ref, const Spacing& spacing, bool with_hd95) {
  if (pred.class_names != ref.class_names) throw ClassMismatch("prediction and reference class lists differ");
  if (pred.labels.shape() != ref.labels.shape()) {
    throw ShapeMismatch("prediction " + to_string(pred.labels.shape()) + " vs reference " +
                        to_string(ref.labels.shape()));
  }
  CaseRecord out;
  for (std::size_t c = 1; c < ref.num_classes(); ++c) {
    const auto id = static_cast<Label>(c);
    ClassRecord rec{ref.class_names[c], dice_score(pred.labels, ref.labels, id), std::nullopt};
    if (with_hd95) rec.hd95_mm = hd95(pred.labels, ref.labels, id, spacing);
    out.push_back(std::move(rec));
  }
  return out;
}

const OrganSummary& MetricsReport::at(const std::string& organ) const {
  const auto it = per_class.find(organ);
  if (it == per_class.end()) throw ClassMismatch("report has no organ '" + organ + "'");
  return it->second;
}

MetricsReport aggregate(const std::vector<CaseRecord>& cases) {
  if (cases.empty()) throw EmptyInput("cannot aggregate zero cases");
  MetricsReport r;
  for (const auto& rec : cases.front()) r.organs.push_back(rec.organ);
  r.n_cases = cases.size();

  for (std::size_t c = 0; c < r.organs.size(); ++c) {
    double dice_sum = 0.0, hd_sum = 0.0;
    std::size_t hd_n = 0;
    for (const auto& cs : cases) {
      if (cs.size() != r.organs.size() || cs[c].organ != r.organs[c]) {
        throw ClassMismatch("cases disagree on the class list");
      }
      dice_sum += cs[c].dice;
      if (cs[c].hd95_mm) {
        hd_sum += *cs[c].hd95_mm;
        ++hd_n;
      }
    }
    OrganSummary s;
    s.dice = dice_sum / static_cast<double>(cases.size());
    if (hd_n > 0) s.hd95_mm = hd_sum / static_cast<double>(hd_n);
    s.hd95_cases = hd_n;
    r.per_class[r.organs[c]] = s;
  }

  double dice_sum = 0.0, hd_sum = 0.0;
  std::size_t hd_n = 0;
  for (const auto& organ : r.organs) {
    const auto& s = r.per_class[organ];
    dice_sum += s.dice;
    if (s.hd95_mm) {
      hd_sum += *s.hd95_mm;
      ++hd_n;
    }
  }
  r.overall_dice = r.organs.empty() ? 0.0 : dice_sum / static_cast<double>(r.organs.size());
  if (hd_n > 0) r.overall_hd95_mm = hd_sum / static_cast<double>(hd_n);
  return r;
}

MetricsReport reorder(MetricsReport r, const std::vector<std::string>& organs) {
  for (const auto& o : organs) (void)r.at(o);
  if (organs.size() != r.organs.size()) throw ClassMismatch("row order does not cover every organ");
  r.organs = organs;
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& organ : r.organs) {
    const auto& s = r.at(organ);
    rows.push_back({{"organ", organ},
                    {"dice", s.dice},
                    {"hd95_mm", s.hd95_mm ? nlohmann::json(*s.hd95_mm) : nlohmann::json(nullptr)},
                    {"hd95_cases", s.hd95_cases}});
  }
  return {{"per_class", rows},
          {"overall_dice", r.overall_dice},
          {"overall_hd95_mm", r.overall_hd95_mm ? nlohmann::json(*r.overall_hd95_mm) : nlohmann::json(nullptr)},
          {"n_cases", r.n_cases}};
}

MetricsReport report_from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    for (const auto& row : j.at("per_class")) {
      const auto organ = row.at("organ").get<std::string>();
      OrganSummary s;
      s.dice = row.at("dice").get<double>();
      if (!row.at("hd95_mm").is_null()) s.hd95_mm = row.at("hd95_mm").get<double>();
      s.hd95_cases = row.value("hd95_cases", std::size_t{0});
      r.organs.push_back(organ);
      r.per_class[organ] = s;
    }
    r.overall_dice = j.at("overall_dice").get<double>();
    if (!j.at("overall_hd95_mm").is_null()) r.overall_hd95_mm = j.at("overall_hd95_mm").get<double>();
    r.n_cases = j.at("n_cases").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid metrics report: ") + e.what());
  }
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string to_csv(const MetricsReport& r) {
  auto hd = [](const std::optional<double>& v) { return v ? format_fixed(*v) : std::string("NA"); };
  std::ostringstream out;
  out << "Organ,DICE,HD95\n";
  for (const auto& organ : r.organs) {
    const auto& s = r.at(organ);
    out << organ << ',' << format_fixed(s.dice) << ',' << hd(s.hd95_mm) << '\n';
  }
  out << "Overall," << format_fixed(r.overall_dice) << ',' << hd(r.overall_hd95_mm) << '\n';
  return out.str();
}

void write_report(const std::filesystem::path& stem, const MetricsReport& r) {
  auto json_path = stem;
  json_path += ".json";
  auto csv_path = stem;
  csv_path += ".csv";
  std::ofstream(json_path, std::ios::trunc) << to_json(r).dump(2) << '\n';
  std::ofstream(csv_path, std::ios::trunc) << to_csv(r);
}

MetricsReport read_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw FormatError("cannot read " + json_path.string());
  try {
    return report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(json_path.string() + ": " + e.what());
  }
}

}  // namespace oarseg
