#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oarseg/data/dataset_spec.hpp"
#include "oarseg/data/volume.hpp"

namespace oarseg {

/// Patient directories under `root`, sorted by name.
std::vector<std::string> list_patients(const std::filesystem::path& root, const DatasetSpec& spec);

/// Loads one patient directory at native resolution.
LabeledVolume load_patient(const std::filesystem::path& patient_dir, const DatasetSpec& spec);

/// Loads every patient under `root`. Incomplete patients are rejected, not skipped:
/// throws MissingStructure or ShapeMismatch for the first offending patient.
std::vector<LabeledVolume> load_dataset(const std::filesystem::path& root, const DatasetSpec& spec);

struct PatientIssue {
  std::string patient;
  std::string message;
};

/// Like load_dataset, but collects every per-patient failure instead of stopping.
std::vector<PatientIssue> scan_dataset(const std::filesystem::path& root, const DatasetSpec& spec);

/// Writes a patient directory in the layout `load_patient` reads.
void write_patient(const std::filesystem::path& root, const LabeledVolume& item, const DatasetSpec& spec);

}  // namespace oarseg
