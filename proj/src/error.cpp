#include "pseudolabel/error.hpp"

namespace pseudolabel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedRle: return "MalformedRle";
    case ErrorCode::DimsMismatch: return "DimsMismatch";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NonFiniteCost: return "NonFiniteCost";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::RaggedFrames: return "RaggedFrames";
    case ErrorCode::MissingConfidence: return "MissingConfidence";
    case ErrorCode::OutOfBoundsPoint: return "OutOfBoundsPoint";
    case ErrorCode::NotEnoughProposals: return "NotEnoughProposals";
    case ErrorCode::NoPoints: return "NoPoints";
    case ErrorCode::DegenerateObject: return "DegenerateObject";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::EmptyEval: return "EmptyEval";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::PipelineError: return "PipelineError";
  }
  return "Unknown";
}

}  // namespace pseudolabel
