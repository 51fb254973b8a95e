#include "oarseg/data/loader.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "oarseg/data/merge.hpp"
#include "oarseg/data/npy.hpp"

namespace fs = std::filesystem;

namespace oarseg {

std::vector<std::string> list_patients(const fs::path& root, const DatasetSpec& spec) {
  (void)spec;
  if (!fs::is_directory(root)) throw FormatError("dataset root '" + root.string() + "' is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

LabeledVolume load_patient(const fs::path& dir, const DatasetSpec& spec) {
  const auto patient = dir.filename().string();
  const auto& layout = spec.layout;

  const auto meta_path = dir / layout.meta_file;
  if (!fs::exists(meta_path)) throw MissingStructure(patient, layout.meta_file);
  nlohmann::json meta;
  try {
    std::ifstream in(meta_path);
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }
  if (!meta.contains("spacing") || !meta["spacing"].is_array() || meta["spacing"].size() != 3) {
    throw FormatError(meta_path.string() + ": 'spacing' must be a 3-element array");
  }

  const auto volume_path = dir / layout.volume_file;
  if (!fs::exists(volume_path)) throw MissingStructure(patient, "volume");

  LabeledVolume out;
  out.volume.patient_id = patient;
  for (std::size_t a = 0; a < 3; ++a) out.volume.spacing[a] = meta["spacing"][a].get<double>();
  out.volume.voxels = npy::read_float(volume_path);
  out.volume.validate();

  std::vector<Grid3<Label>> masks;
  std::vector<std::string> names;
  for (const auto& organ : spec.organs) {
    const auto mask_path = dir / layout.mask_file(organ);
    if (!fs::exists(mask_path)) throw MissingStructure(patient, organ.key);
    auto mask = npy::read_u8(mask_path);
    if (mask.shape() != out.volume.voxels.shape()) {
      throw ShapeMismatch("patient '" + patient + "': mask '" + organ.key + "' is " + to_string(mask.shape()) +
                          " but the volume is " + to_string(out.volume.voxels.shape()));
    }
    for (auto& v : mask.values()) v = v != 0 ? 1 : 0;
    masks.push_back(std::move(mask));
    names.push_back(organ.display);
  }
  out.labels = merge_masks(masks, names);
  if (spec.organs.empty()) out.labels.labels = Grid3<Label>(out.volume.voxels.shape(), 0);
  return out;
}

std::vector<LabeledVolume> load_dataset(const fs::path& root, const DatasetSpec& spec) {
  std::vector<LabeledVolume> out;
  for (const auto& id : list_patients(root, spec)) out.push_back(load_patient(root / id, spec));
  return out;
}

std::vector<PatientIssue> scan_dataset(const fs::path& root, const DatasetSpec& spec) {
  std::vector<PatientIssue> issues;
  for (const auto& id : list_patients(root, spec)) {
    try {
      (void)load_patient(root / id, spec);
    } catch (const Error& e) {
      issues.push_back({id, e.what()});
    }
  }
  return issues;
}

void write_patient(const fs::path& root, const LabeledVolume& item, const DatasetSpec& spec) {
  check_paired(item.volume, item.labels);
  const auto dir = root / item.volume.patient_id;
  fs::create_directories(dir);
  nlohmann::json meta;
  meta["patient_id"] = item.volume.patient_id;
  meta["spacing"] = item.volume.spacing;
  meta["organs"] = nlohmann::json::array();
  for (const auto& o : spec.organs) meta["organs"].push_back(o.key);
  std::ofstream(dir / spec.layout.meta_file) << meta.dump(2) << '\n';
  npy::write(dir / spec.layout.volume_file, item.volume.voxels);
  for (std::size_t i = 0; i < spec.organs.size(); ++i) {
    npy::write(dir / spec.layout.mask_file(spec.organs[i]), binarize(item.labels, static_cast<Label>(i + 1)));
  }
}

}  // namespace oarseg
