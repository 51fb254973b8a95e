#include "oarseg/data/split.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "oarseg/errors.hpp"

namespace oarseg {
namespace {

// Unbiased draw from [0, bound) by rejection.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

std::size_t floor_count(double ratio, std::size_t n) {
  // The epsilon absorbs representation error such as 0.15 * 20 = 2.9999...
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::string_view to_string(SplitName s) {
  switch (s) {
    case SplitName::train: return "train";
    case SplitName::val: return "val";
    case SplitName::test: return "test";
  }
  return "?";
}

SplitName split_name_from_string(std::string_view s) {
  if (s == "train") return SplitName::train;
  if (s == "val") return SplitName::val;
  if (s == "test") return SplitName::test;
  throw InvalidConfig("unknown split '" + std::string(s) + "'");
}

const std::vector<std::string>& SplitAssignment::ids(SplitName s) const {
  switch (s) {
    case SplitName::train: return train_ids;
    case SplitName::val: return val_ids;
    case SplitName::test: return test_ids;
  }
  return train_ids;
}

SplitAssignment split_patients(const std::vector<std::string>& ids, const SplitRatios& ratios, std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (r < 0.0 || !std::isfinite(r)) throw InvalidRatios("split ratios must be nonnegative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidRatios("split ratios sum to " + std::to_string(sum) + ", not 1");
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    throw InvalidConfig("patient ids are not unique");
  }

  std::vector<std::string> order = ids;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[bounded(rng, i)]);
  }

  const auto n = order.size();
  const auto n_val = floor_count(ratios[1], n);
  const auto n_test = floor_count(ratios[2], n);
  const auto n_train = n - n_val - n_test;

  SplitAssignment s;
  s.ratios = ratios;
  s.seed = seed;
  s.train_ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

nlohmann::json to_json(const SplitAssignment& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["ratios"] = s.ratios;
  j["train"] = s.train_ids;
  j["val"] = s.val_ids;
  j["test"] = s.test_ids;
  return nlohmann::json::parse(j.dump());
}

SplitAssignment split_from_json(const nlohmann::json& j) {
  try {
    SplitAssignment s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ratios = j.at("ratios").get<SplitRatios>();
    s.train_ids = j.at("train").get<std::vector<std::string>>();
    s.val_ids = j.at("val").get<std::vector<std::string>>();
    s.test_ids = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid split manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const SplitAssignment& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["ratios"] = s.ratios;
  j["train"] = s.train_ids;
  j["val"] = s.val_ids;
  j["test"] = s.test_ids;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

SplitAssignment read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  try {
    return split_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace oarseg
