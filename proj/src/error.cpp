#include "rankstab/error.hpp"

namespace rankstab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::CannotStratify: return "CannotStratify";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::TooManyFeatures: return "TooManyFeatures";
    case ErrorCode::EmptyBackground: return "EmptyBackground";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
    case ErrorCode::MismatchedElements: return "MismatchedElements";
    case ErrorCode::TooFewRankings: return "TooFewRankings";
    case ErrorCode::RankTooShort: return "RankTooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::DatasetLoad: return "DatasetLoad";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::SchemaVersionUnsupported: return "SchemaVersionUnsupported";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::NoRecords: return "NoRecords";
  }
  return "UnknownError";
}

}  // namespace rankstab
