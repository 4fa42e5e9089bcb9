#pragma once

#include <stdexcept>
#include <string>

namespace rankstab {

enum class ErrorCode {
  MissingColumn,
  ParseError,
  SingleClassDataset,
  EmptyDataset,
  CannotStratify,
  NonFinite,
  WidthMismatch,
  TooManyFeatures,
  EmptyBackground,
  DegenerateSamples,
  MismatchedElements,
  TooFewRankings,
  RankTooShort,
  LengthMismatch,
  TooFewValues,
  DatasetLoad,
  ConfigInvalid,
  SchemaVersionUnsupported,
  CorruptRecord,
  NoRecords,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception. Carries a machine-readable code so the CLI can
/// map failures onto its exit-code table.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rankstab
