#include "churnfuse/error.hpp"

namespace churnfuse {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ValueError: return "ValueError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidDuration: return "InvalidDuration";
    case ErrorCode::ClipTooShort: return "ClipTooShort";
    case ErrorCode::BadFrameParams: return "BadFrameParams";
    case ErrorCode::BadKernel: return "BadKernel";
    case ErrorCode::BadBand: return "BadBand";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooFewExamples: return "TooFewExamples";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::EmptyLabeledSet: return "EmptyLabeledSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::TooFewMinority: return "TooFewMinority";
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::MissingModality: return "MissingModality";
    case ErrorCode::NoRelevant: return "NoRelevant";
    case ErrorCode::EmptyQuerySet: return "EmptyQuerySet";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace churnfuse
