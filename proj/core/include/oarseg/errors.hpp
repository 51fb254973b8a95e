#pragma once

#include <stdexcept>
#include <string>

namespace oarseg {

/// Coarse failure class; the CLI maps it onto process exit codes.
enum class ErrorKind { data, usage, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define OARSEG_DEFINE_ERROR(Name, Kind)                                        \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}  \
  };

// Data ingestion and dataset consistency.
OARSEG_DEFINE_ERROR(ShapeMismatch, data)
OARSEG_DEFINE_ERROR(InvalidRatios, usage)
OARSEG_DEFINE_ERROR(FormatError, data)
OARSEG_DEFINE_ERROR(LabelOutOfRange, data)
OARSEG_DEFINE_ERROR(ClassMismatch, data)
OARSEG_DEFINE_ERROR(DatasetMismatch, data)
OARSEG_DEFINE_ERROR(EmptyInput, data)
OARSEG_DEFINE_ERROR(MissingCurves, data)

// Model / configuration.
OARSEG_DEFINE_ERROR(InvalidConfig, usage)
OARSEG_DEFINE_ERROR(ShapeError, usage)
OARSEG_DEFINE_ERROR(ConfigMismatch, usage)

// Training and persistence.
OARSEG_DEFINE_ERROR(DivergenceError, internal)
OARSEG_DEFINE_ERROR(CorruptCheckpoint, data)

#undef OARSEG_DEFINE_ERROR

/// A required organ mask (or the volume itself) is absent for a patient.
class MissingStructure : public Error {
 public:
  MissingStructure(std::string patient, std::string organ)
      : Error(ErrorKind::data, "patient '" + patient + "' is missing structure '" + organ + "'"),
        patient_(std::move(patient)),
        organ_(std::move(organ)) {}

  const std::string& patient() const noexcept { return patient_; }
  const std::string& organ() const noexcept { return organ_; }

 private:
  std::string patient_;
  std::string organ_;
};

}  // namespace oarseg
