#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "oarseg/data/dataset_spec.hpp"
#include "oarseg/data/loader.hpp"
#include "oarseg/data/synthetic.hpp"

namespace oarseg::test {

inline std::filesystem::path data_dir() { return OARSEG_TEST_DATA_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("oarseg_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline void write_phantoms(const std::filesystem::path& root, std::int64_t count, std::int64_t extent = 16,
                           std::uint64_t seed = 7) {
  SyntheticOptions opt;
  opt.extent = extent;
  opt.seed = seed;
  const auto spec = synthetic_spec();
  for (const auto& item : make_synthetic_dataset(count, opt)) write_patient(root, item, spec);
}

template <typename T>
Grid3<T> random_grid(Shape3 s, std::mt19937_64& rng, int max_value) {
  std::uniform_int_distribution<int> dist(0, max_value);
  Grid3<T> g(s);
  for (auto& v : g.values()) v = static_cast<T>(dist(rng));
  return g;
}

}  // namespace oarseg::test
