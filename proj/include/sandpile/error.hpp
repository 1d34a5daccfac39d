#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sandpile {

enum class ErrorCode {
  InvalidArgument,
  DisconnectedGraph,
  SelfLoop,
  BadSink,
  NonIntegerNetwork,
  NotStable,
  Overflow,
  SingularSystem,
  InfiniteBound,
  InfeasibleCertificate,
  MaxIterations,
  NonPlanarEmbedding,
  NotBoundaryEdge,
  Disconnecting,
  NotDegreeThree,
  CenterIsCritical,
  BoundaryMismatch,
  WouldDisconnect,
  WouldMergePoles,
  SchemaError,
  AssertionFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::BadSink: return "BadSink";
    case ErrorCode::NonIntegerNetwork: return "NonIntegerNetwork";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InfiniteBound: return "InfiniteBound";
    case ErrorCode::InfeasibleCertificate: return "InfeasibleCertificate";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonPlanarEmbedding: return "NonPlanarEmbedding";
    case ErrorCode::NotBoundaryEdge: return "NotBoundaryEdge";
    case ErrorCode::Disconnecting: return "Disconnecting";
    case ErrorCode::NotDegreeThree: return "NotDegreeThree";
    case ErrorCode::CenterIsCritical: return "CenterIsCritical";
    case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorCode::WouldDisconnect: return "WouldDisconnect";
    case ErrorCode::WouldMergePoles: return "WouldMergePoles";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace sandpile
