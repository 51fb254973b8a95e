#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oarseg/data/split.hpp"

namespace oarseg {

/// Layout of one run directory.
struct RunPaths {
  std::filesystem::path dir;

  std::filesystem::path config() const { return dir / "config.json"; }
  std::filesystem::path best() const { return dir / "best.ckpt"; }
  std::filesystem::path last() const { return dir / "last.ckpt"; }
  std::filesystem::path curves() const { return dir / "curves.csv"; }
  std::filesystem::path class_dice() const { return dir / "class_dice.csv"; }
  std::filesystem::path lr_trace() const { return dir / "lr_trace.csv"; }
  std::filesystem::path split_manifest() const { return dir / "split.json"; }
  std::filesystem::path report_stem(SplitName split) const { return dir / ("report_" + std::string(to_string(split))); }
  std::filesystem::path report_json(SplitName split) const;
};

/// `explicit_root` if given, else $OARSEG_RUNS_DIR, else "./runs".
std::filesystem::path runs_root(const std::optional<std::filesystem::path>& explicit_root = std::nullopt);

RunPaths run_paths(const std::filesystem::path& root, std::string_view run_name);

/// Writes through a temporary sibling, then renames.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

std::string read_text(const std::filesystem::path& path);

struct CurvePoint {
  std::int64_t epoch = 0;
  double loss = 0.0;
  double mean_dice = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct Curves {
  std::vector<CurvePoint> train;
  std::vector<CurvePoint> val;
};

/// "epoch,split,loss,mean_dice" rows, train then val per epoch.
void write_curves(const std::filesystem::path& path, const Curves& c);
/// Throws MissingCurves when the file is absent or malformed.
Curves read_curves(const std::filesystem::path& path);

/// Per-epoch validation DICE per foreground class: "epoch,<organ>,<organ>,...".
struct ClassDiceTable {
  std::vector<std::string> organs;
  std::vector<std::int64_t> epochs;
  std::vector<std::vector<double>> dice;  // [epoch row][organ]
};

void write_class_dice(const std::filesystem::path& path, const ClassDiceTable& t);
ClassDiceTable read_class_dice(const std::filesystem::path& path);

}  // namespace oarseg
