#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oarseg {

using SplitRatios = std::array<double, 3>;  // train, val, test

inline constexpr SplitRatios kDefaultSplitRatios{0.7, 0.15, 0.15};

enum class SplitName { train, val, test };

std::string_view to_string(SplitName s);
SplitName split_name_from_string(std::string_view s);

struct SplitAssignment {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
  SplitRatios ratios = kDefaultSplitRatios;
  std::uint64_t seed = 0;

  const std::vector<std::string>& ids(SplitName s) const;
  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

/// Seeded uniform shuffle, then |val| = floor(r_val*N), |test| = floor(r_test*N) and
/// train takes the remainder. Throws InvalidRatios for negative ratios or a sum that is
/// not 1 (within 1e-9).
SplitAssignment split_patients(const std::vector<std::string>& ids, const SplitRatios& ratios,
                               std::uint64_t seed);

/// Manifest JSON: {"seed": int, "ratios": [..], "train": [...], "val": [...], "test": [...]}
nlohmann::json to_json(const SplitAssignment& s);
SplitAssignment split_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& path, const SplitAssignment& s);
SplitAssignment read_manifest(const std::filesystem::path& path);

}  // namespace oarseg
