#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speclab {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveOperator,
  CutoffTooSmall,
  AboveCutoff,
  TailTooLarge,
  QuadratureFailure,
  BoseDivergence,
  InsufficientOrder,
  PoleOfZeta,
  NonPositiveShiftedOperator,
  IllConditioned,
  RankDeficient,
  NotElliptic,
  WrongAlgebraicStructure,
  ContourTooShort,
  CurvedScopeUnsupported,
  SingularD,
  NonIntegrableDiagonal,
  NonCommutingPair,
  UnsupportedModel,
  KernelNotBounded,
};

std::string_view to_string(ErrorCode code);

/// Validation errors are caller mistakes (bad input, violated preconditions);
/// everything else is a numerical failure. The CLI maps them to exit codes 2 and 3.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace speclab
