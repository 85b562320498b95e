#pragma once

#include <stdexcept>
#include <string>

namespace mhmp {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  RankMismatch,
  ShapeError,
  SingularMatrix,
  NotPSD,
  NotInClass,
  CompressionResidual,
  SingularHead,
  SingularTheta,
  NotNeutral,
  SingularDenominator,
  NonSimplePole,
  NonRealPole,
  ReconstructionMismatch,
  RealPoint,
  SingularCayley,
  ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mhmp
