#include "oarseg/engine/ablation.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "oarseg/engine/run_files.hpp"
#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

std::string slug(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

ExperimentConfig arm_base(const ExperimentConfig& base, AblationKind kind, const std::string& label) {
  auto cfg = base;
  cfg.mode = RunMode::custom;
  cfg.run_name = base.run_name + "_" + std::string(to_string(kind)) + "_" + slug(label);
  return cfg;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_fixed(*v) : "NA"; }

}  // namespace

std::string_view to_string(AblationKind k) {
  switch (k) {
    case AblationKind::loss_weights: return "loss_weights";
    case AblationKind::scheduler: return "scheduler";
    case AblationKind::encoder: return "encoder";
  }
  return "?";
}

AblationKind ablation_kind_from_string(std::string_view s) {
  if (s == "loss_weights") return AblationKind::loss_weights;
  if (s == "scheduler") return AblationKind::scheduler;
  if (s == "encoder") return AblationKind::encoder;
  throw InvalidConfig("unknown ablation '" + std::string(s) + "' (loss_weights, scheduler, encoder)");
}

std::vector<AblationArm> ablation_arms(AblationKind kind, const ExperimentConfig& base) {
  std::vector<AblationArm> arms;
  switch (kind) {
    case AblationKind::loss_weights: {
      constexpr std::array<std::array<double, 2>, 7> grid{{{1.0, 0.0}, {0.8, 0.2}, {0.6, 0.4}, {0.5, 0.5},
                                                           {0.4, 0.6}, {0.2, 0.8}, {0.0, 1.0}}};
      for (const auto& [d, c] : grid) {
        const auto label = "dice " + format_fixed(d, 1) + " / ce " + format_fixed(c, 1);
        auto cfg = arm_base(base, kind, label);
        cfg.loss.dice_weight = d;
        cfg.loss.ce_weight = c;
        arms.push_back({label, cfg});
      }
      break;
    }
    case AblationKind::scheduler: {
      const std::array<std::pair<const char*, LrPolicy>, 4> policies{{{"without cyclicLR", LrPolicy::constant},
                                                                      {"triangular", LrPolicy::triangular},
                                                                      {"triangular2", LrPolicy::triangular2},
                                                                      {"exp_range", LrPolicy::exp_range}}};
      for (const auto& [label, policy] : policies) {
        auto cfg = arm_base(base, kind, label);
        cfg.scheduler.policy = policy;
        arms.push_back({label, cfg});
      }
      break;
    }
    case AblationKind::encoder: {
      for (auto enc : {EncoderKind::resnet34_style, EncoderKind::efficientnet_style}) {
        const std::string label(to_string(enc));
        auto cfg = arm_base(base, kind, label);
        cfg.model.encoder = enc;
        arms.push_back({label, cfg});
      }
      break;
    }
  }
  return arms;
}

std::vector<AblationArm> select_arms(std::vector<AblationArm> arms, const std::vector<std::string>& labels) {
  if (labels.empty()) return arms;
  std::vector<AblationArm> out;
  for (const auto& l : labels) {
    const auto it = std::find_if(arms.begin(), arms.end(), [&](const AblationArm& a) { return a.label == l || slug(a.label) == l; });
    if (it == arms.end()) throw InvalidConfig("unknown arm '" + l + "'");
    out.push_back(*it);
  }
  return out;
}

bool AblationReport::all_failed() const {
  return std::none_of(arms.begin(), arms.end(), [](const ArmResult& a) { return a.overall_dice.has_value(); });
}

AblationReport run_ablation(AblationKind kind, const std::vector<AblationArm>& arms, const FitOptions& fit_opts,
                            SplitName split, const std::function<void(const ArmResult&)>& on_arm) {
  AblationReport report{kind, split, {}};
  for (const auto& arm : arms) {
    ArmResult r{arm.label, arm.cfg.run_name, std::nullopt, std::nullopt, {}};
    try {
      auto opts = fit_opts;
      opts.config_document = to_json(arm.cfg);
      const auto state = fit(arm.cfg, opts);
      const auto paths = run_paths(fit_opts.runs_root, arm.cfg.run_name);
      const auto ckpt = state.best ? paths.best() : paths.last();
      const auto ev = evaluate_checkpoint(ckpt, split, arm.cfg);
      write_report(paths.report_stem(split), ev.report);
      r.overall_dice = ev.report.overall_dice;
      r.overall_hd95_mm = ev.report.overall_hd95_mm;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    if (on_arm) on_arm(r);
    report.arms.push_back(std::move(r));
  }
  return report;
}

std::string to_csv(const AblationReport& r) {
  std::string head = "Metric", dice = "Overall DICE", hd = "Overall HD95";
  for (const auto& a : r.arms) {
    head += "," + a.label;
    dice += "," + opt_cell(a.overall_dice);
    hd += "," + opt_cell(a.overall_hd95_mm);
  }
  return head + "\n" + dice + "\n" + hd + "\n";
}

std::string ranked_csv(const AblationReport& r) {
  auto arms = r.arms;
  std::stable_sort(arms.begin(), arms.end(), [](const ArmResult& a, const ArmResult& b) {
    if (a.overall_dice.has_value() != b.overall_dice.has_value()) return a.overall_dice.has_value();
    return a.overall_dice.value_or(0.0) > b.overall_dice.value_or(0.0);
  });
  std::string out = "Rank,Arm,DICE,HD95,Error\n";
  for (std::size_t i = 0; i < arms.size(); ++i) {
    out += std::to_string(i + 1) + "," + arms[i].label + "," + opt_cell(arms[i].overall_dice) + "," +
           opt_cell(arms[i].overall_hd95_mm) + "," + csv_safe(arms[i].error) + "\n";
  }
  return out;
}

nlohmann::json to_json(const AblationReport& r) {
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& a : r.arms) {
    arms.push_back({{"label", a.label},
                    {"run", a.run_name},
                    {"overall_dice", a.overall_dice ? nlohmann::json(*a.overall_dice) : nlohmann::json(nullptr)},
                    {"overall_hd95_mm", a.overall_hd95_mm ? nlohmann::json(*a.overall_hd95_mm) : nlohmann::json(nullptr)},
                    {"error", a.error}});
  }
  return {{"kind", std::string(to_string(r.kind))}, {"split", std::string(to_string(r.split))}, {"arms", arms}};
}

}  // namespace oarseg
