#include "oarseg/engine/experiment.hpp"

#include <fstream>

#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

constexpr double kEnhancedDice = 0.4;
constexpr double kEnhancedCe = 0.6;
constexpr double kBaseLr = 0.001;
constexpr double kMaxLr = 0.006;

void enforce_mode_against_json(RunMode mode, const nlohmann::json& j) {
  if (mode == RunMode::custom) return;
  const auto name = std::string(to_string(mode));
  if (j.contains("loss")) {
    const auto& l = j.at("loss");
    const double dice = l.value("dice_weight", mode == RunMode::baseline ? 1.0 : kEnhancedDice);
    const double ce = l.value("ce_weight", mode == RunMode::baseline ? 0.0 : kEnhancedCe);
    const bool ok = mode == RunMode::baseline ? (ce == 0.0 && dice > 0.0) : (dice == kEnhancedDice && ce == kEnhancedCe);
    if (!ok) throw InvalidConfig(name + " mode fixes the loss weights; use mode=custom to change them");
  }
  if (j.contains("scheduler") && j.at("scheduler").contains("policy")) {
    const auto policy = lr_policy_from_string(j.at("scheduler").at("policy").get<std::string>());
    const auto want = mode == RunMode::baseline ? LrPolicy::constant : LrPolicy::exp_range;
    if (policy != want) {
      throw InvalidConfig(name + " mode requires the " + std::string(to_string(want)) + " scheduler");
    }
  }
}

}  // namespace

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::baseline: return "baseline";
    case RunMode::enhanced: return "enhanced";
    case RunMode::custom: return "custom";
  }
  return "?";
}

RunMode run_mode_from_string(std::string_view s) {
  if (s == "baseline") return RunMode::baseline;
  if (s == "enhanced") return RunMode::enhanced;
  if (s == "custom") return RunMode::custom;
  throw InvalidConfig("unknown mode '" + std::string(s) + "'");
}

std::int64_t ExperimentConfig::effective_batch_size() const {
  if (batch_size) return *batch_size;
  return model.dims() == 3 ? 2 : 16;
}

void ExperimentConfig::validate() const {
  model.validate();
  loss.validate();
  scheduler.validate();
  augmentation.validate();
  if (epochs < 0) throw InvalidConfig("epochs must be nonnegative");
  if (effective_batch_size() < 1) throw InvalidConfig("batch_size must be >= 1");
  if (!(foreground_prob >= 0.0 && foreground_prob <= 1.0)) throw InvalidConfig("foreground_prob must lie in [0,1]");
  if (run_name.empty() || run_name.find("..") != std::string::npos) throw InvalidConfig("invalid run_name");
  if (patch_size) {
    if (!patch_size->valid()) throw InvalidConfig("patch_size must be positive");
    const auto div = model.divisor();
    const std::size_t first = model.dims() == 3 ? 0 : 1;  // 2D variants only tile in-plane
    for (std::size_t a = first; a < 3; ++a) {
      if ((*patch_size)[a] % div != 0) {
        throw InvalidConfig("patch extent " + std::to_string((*patch_size)[a]) + " is not a multiple of " +
                            std::to_string(div));
      }
    }
  }
  const auto expected_classes = static_cast<std::int64_t>(dataset.spec().num_foreground() + 1);
  if (model.num_classes != expected_classes) {
    throw InvalidConfig("model.num_classes is " + std::to_string(model.num_classes) + " but dataset '" +
                        std::string(to_string(dataset.name)) + "' has " + std::to_string(expected_classes) +
                        " classes");
  }
  switch (mode) {
    case RunMode::baseline:
      if (!loss.dice_only()) throw InvalidConfig("baseline mode trains with the DICE loss only");
      if (scheduler.policy != LrPolicy::constant) throw InvalidConfig("baseline mode uses a constant learning rate");
      break;
    case RunMode::enhanced:
      if (loss.dice_weight != kEnhancedDice || loss.ce_weight != kEnhancedCe) {
        throw InvalidConfig("enhanced mode uses DICE 0.4 + CE 0.6");
      }
      if (scheduler.policy != LrPolicy::exp_range || scheduler.base_lr != kBaseLr || scheduler.max_lr != kMaxLr) {
        throw InvalidConfig("enhanced mode uses exp_range between 0.001 and 0.006");
      }
      break;
    case RunMode::custom: break;
  }
}

void apply_mode(ExperimentConfig& cfg) {
  switch (cfg.mode) {
    case RunMode::baseline:
      cfg.loss.dice_weight = 1.0;
      cfg.loss.ce_weight = 0.0;
      cfg.scheduler.policy = LrPolicy::constant;
      cfg.scheduler.base_lr = kBaseLr;
      cfg.scheduler.max_lr = kMaxLr;
      break;
    case RunMode::enhanced:
      cfg.loss.dice_weight = kEnhancedDice;
      cfg.loss.ce_weight = kEnhancedCe;
      cfg.scheduler.policy = LrPolicy::exp_range;
      cfg.scheduler.base_lr = kBaseLr;
      cfg.scheduler.max_lr = kMaxLr;
      break;
    case RunMode::custom: break;
  }
}

ExperimentConfig ExperimentConfig::for_mode(RunMode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.model.num_classes = static_cast<std::int64_t>(cfg.dataset.spec().num_foreground() + 1);
  apply_mode(cfg);
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = {{"name", std::string(to_string(cfg.dataset.name))},
                  {"root", cfg.dataset.root.string()},
                  {"ratios", cfg.dataset.ratios}};
  j["model"] = cfg.model;
  j["loss"] = cfg.loss;
  j["scheduler"] = cfg.scheduler;
  j["augmentation"] = cfg.augmentation;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.effective_batch_size();
  if (cfg.patch_size) {
    j["patch_size"] = {cfg.patch_size->d, cfg.patch_size->h, cfg.patch_size->w};
  } else {
    j["patch_size"] = "full";
  }
  j["foreground_prob"] = cfg.foreground_prob;
  j["seed"] = cfg.seed;
  j["run_name"] = cfg.run_name;
  j["mode"] = std::string(to_string(cfg.mode));
  return j;
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig cfg;
    cfg.mode = run_mode_from_string(j.value("mode", std::string("enhanced")));
    enforce_mode_against_json(cfg.mode, j);
    apply_mode(cfg);

    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      if (d.contains("name")) cfg.dataset.name = dataset_name_from_string(d.at("name").get<std::string>());
      if (d.contains("root")) cfg.dataset.root = d.at("root").get<std::string>();
      if (d.contains("ratios")) cfg.dataset.ratios = d.at("ratios").get<SplitRatios>();
    }
    auto model_json = j.value("model", nlohmann::json::object());
    if (!model_json.contains("num_classes")) {
      model_json["num_classes"] = cfg.dataset.spec().num_foreground() + 1;
    }
    cfg.model = model_json.get<ModelConfig>();
    if (j.contains("loss")) {
      auto l = cfg.loss;
      from_json(j.at("loss"), l);
      cfg.loss = l;
    }
    if (j.contains("scheduler")) {
      auto s = cfg.scheduler;
      from_json(j.at("scheduler"), s);
      cfg.scheduler = s;
    }
    if (j.contains("augmentation")) {
      auto a = cfg.augmentation;
      from_json(j.at("augmentation"), a);
      cfg.augmentation = a;
    }
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<std::int64_t>();
    if (j.contains("batch_size") && !j.at("batch_size").is_null()) cfg.batch_size = j.at("batch_size").get<std::int64_t>();
    if (j.contains("patch_size")) {
      const auto& p = j.at("patch_size");
      if (p.is_string()) {
        if (p.get<std::string>() != "full") throw InvalidConfig("patch_size must be a 3-vector or \"full\"");
        cfg.patch_size.reset();
      } else {
        cfg.patch_size = Shape3{p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>(), p.at(2).get<std::int64_t>()};
      }
    }
    if (j.contains("foreground_prob")) cfg.foreground_prob = j.at("foreground_prob").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("run_name")) cfg.run_name = j.at("run_name").get<std::string>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("malformed experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config " + path.string());
  try {
    return experiment_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
}

void apply_override(nlohmann::json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw InvalidConfig("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw InvalidConfig("override key '" + key + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw InvalidConfig("override '" + key + "' descends into a non-object");
      *node = nlohmann::json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace oarseg
