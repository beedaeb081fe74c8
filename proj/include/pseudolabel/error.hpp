#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pseudolabel {

enum class ErrorCode {
  InvalidArgument,
  MalformedRle,
  DimsMismatch,
  ShapeError,
  NonFiniteCost,
  TooLarge,
  EmptyRegion,
  TooManyPoints,
  RaggedFrames,
  MissingConfidence,
  OutOfBoundsPoint,
  NotEnoughProposals,
  NoPoints,
  DegenerateObject,
  UnknownObject,
  EmptyEval,
  SchemaError,
  PipelineError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the document loaders. `path` is a JSON pointer to the offending
// value, e.g. "/objects/1/frames/0/points/2/x".
class SchemaError : public Error {
 public:
  SchemaError(std::string file, std::string path, std::string reason)
      : Error(ErrorCode::SchemaError, file + ": " + path + ": " + reason),
        file_(std::move(file)),
        path_(std::move(path)),
        reason_(std::move(reason)) {}

  const std::string& file() const noexcept { return file_; }
  const std::string& path() const noexcept { return path_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string file_;
  std::string path_;
  std::string reason_;
};

}  // namespace pseudolabel
