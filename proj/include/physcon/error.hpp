#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace physcon {

enum class ErrorKind {
  InvalidRotation,
  DegenerateInput,
  IterationLimit,
  DegenerateRay,
  NoSupportBelow,
  NonFiniteCost,
  InsufficientPairs,
  EmptyResult,
  NoConsensus,
  PreconditionViolated,
  ParseError,
  MissingMesh,
  InvalidQuaternion,
  BehindCamera,
  PlacementFailure,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by the numerics rather than by malformed input.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace physcon
