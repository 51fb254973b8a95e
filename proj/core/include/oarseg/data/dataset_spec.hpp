#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace oarseg {

enum class DatasetName { openkbp, pddca, nsclc, synthetic };

std::string_view to_string(DatasetName n);
DatasetName dataset_name_from_string(std::string_view s);

/// A foreground structure: display name used in tables plus the file key of its mask.
struct Organ {
  std::string display;
  std::string key;  // mask file is mask_<key>.npy

  friend bool operator==(const Organ&, const Organ&) = default;
};

/// Directory convention of a dataset root:
///   <root>/<patient_id>/volume.npy
///   <root>/<patient_id>/mask_<organ key>.npy
///   <root>/<patient_id>/meta.json
struct RootLayout {
  std::string volume_file = "volume.npy";
  std::string mask_prefix = "mask_";
  std::string mask_suffix = ".npy";
  std::string meta_file = "meta.json";

  std::string mask_file(const Organ& o) const { return mask_prefix + o.key + mask_suffix; }
};

struct DatasetSpec {
  DatasetName name = DatasetName::synthetic;
  std::vector<Organ> organs;  // label i+1 belongs to organs[i]
  RootLayout layout;
  /// Row order of the published comparison tables, as indices into `organs`.
  std::vector<std::size_t> table_order;

  std::vector<std::string> class_names() const;  // "background" first
  std::size_t num_foreground() const { return organs.size(); }
};

DatasetSpec openkbp_spec();
DatasetSpec pddca_spec();
DatasetSpec nsclc_spec();
/// Lung-like ellipsoid, cord-like tube and chiasm-like sphere.
DatasetSpec synthetic_spec();
DatasetSpec dataset_spec(DatasetName n);

}  // namespace oarseg
