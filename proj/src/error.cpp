#include "physcon/error.hpp"

namespace physcon {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidRotation: return "InvalidRotation";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::DegenerateRay: return "DegenerateRay";
    case ErrorKind::NoSupportBelow: return "NoSupportBelow";
    case ErrorKind::NonFiniteCost: return "NonFiniteCost";
    case ErrorKind::InsufficientPairs: return "InsufficientPairs";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::NoConsensus: return "NoConsensus";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingMesh: return "MissingMesh";
    case ErrorKind::InvalidQuaternion: return "InvalidQuaternion";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::PlacementFailure: return "PlacementFailure";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IterationLimit:
    case ErrorKind::NonFiniteCost:
    case ErrorKind::NoConsensus:
    case ErrorKind::DegenerateRay:
    case ErrorKind::PlacementFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace physcon
