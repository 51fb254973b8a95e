#include "oarseg/optim/scheduler.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oarseg/errors.hpp"

namespace oarseg {

std::string_view to_string(LrPolicy p) {
  switch (p) {
    case LrPolicy::constant: return "constant";
    case LrPolicy::triangular: return "triangular";
    case LrPolicy::triangular2: return "triangular2";
    case LrPolicy::exp_range: return "exp_range";
  }
  return "?";
}

LrPolicy lr_policy_from_string(std::string_view s) {
  if (s == "constant") return LrPolicy::constant;
  if (s == "triangular") return LrPolicy::triangular;
  if (s == "triangular2") return LrPolicy::triangular2;
  if (s == "exp_range") return LrPolicy::exp_range;
  throw InvalidConfig("unknown scheduler policy '" + std::string(s) + "'");
}

void SchedulerConfig::validate() const {
  if (!(base_lr > 0.0) || !(base_lr <= max_lr)) throw InvalidConfig("scheduler needs 0 < base_lr <= max_lr");
  if (step_size < 0) throw InvalidConfig("scheduler step_size must be >= 1 (or 0 for the default)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidConfig("scheduler gamma must lie in (0, 1]");
}

void to_json(nlohmann::json& j, const SchedulerConfig& c) {
  j = nlohmann::json{{"policy", std::string(to_string(c.policy))},
                     {"base_lr", c.base_lr},
                     {"max_lr", c.max_lr},
                     {"step_size", c.step_size},
                     {"gamma", c.gamma}};
}

void from_json(const nlohmann::json& j, SchedulerConfig& c) {
  if (j.contains("policy")) c.policy = lr_policy_from_string(j.at("policy").get<std::string>());
  if (j.contains("base_lr")) c.base_lr = j.at("base_lr").get<double>();
  if (j.contains("max_lr")) c.max_lr = j.at("max_lr").get<double>();
  if (j.contains("step_size")) c.step_size = j.at("step_size").get<std::int64_t>();
  if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
  c.validate();
}

double lr_at(const SchedulerConfig& cfg, std::int64_t iteration) {
  if (iteration < 0) throw InvalidConfig("iteration must be nonnegative");
  if (cfg.policy == LrPolicy::constant) return cfg.base_lr;
  if (cfg.step_size < 1) throw InvalidConfig("cyclic schedule needs step_size >= 1");

  const double t = static_cast<double>(iteration);
  const double step = static_cast<double>(cfg.step_size);
  const double cycle = std::floor(1.0 + t / (2.0 * step));
  const double x = std::abs(t / step - 2.0 * cycle + 1.0);
  double scale = 1.0;
  if (cfg.policy == LrPolicy::triangular2) scale = std::pow(2.0, 1.0 - cycle);
  if (cfg.policy == LrPolicy::exp_range) scale = std::pow(cfg.gamma, t);
  return cfg.base_lr + (cfg.max_lr - cfg.base_lr) * std::max(0.0, 1.0 - x) * scale;
}

LrTrace lr_trace(const SchedulerConfig& cfg, std::int64_t iterations) {
  LrTrace out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(iterations, 0)));
  for (std::int64_t t = 0; t < iterations; ++t) out.emplace_back(t, lr_at(cfg, t));
  return out;
}

void write_lr_trace(const std::filesystem::path& path, const LrTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "iteration,lr\n";
  char buf[64];
  for (const auto& [t, lr] : trace) {
    std::snprintf(buf, sizeof(buf), "%.17g", lr);
    out << t << ',' << buf << '\n';
  }
}

LrTrace read_lr_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingCurves("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "iteration,lr") throw FormatError(path.string() + ": unexpected header '" + line + "'");
  LrTrace out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError(path.string() + ": malformed row '" + line + "'");
    out.emplace_back(std::stoll(line.substr(0, comma)), std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return out;
}

}  // namespace oarseg
