#pragma once

#include <stdexcept>
#include <string>

namespace dc {

enum class ErrorKind {
  Validation,
  Dimension,
  Rank,
  Singular,
  Numerical,
  Io,
};

/// Base class of all library errors; carries a machine-readable kind
/// so the C API and the CLI can map exceptions to status/exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(ErrorKind::Dimension, what) {}
};

struct RankError : Error {
  explicit RankError(const std::string& what) : Error(ErrorKind::Rank, what) {}
};

struct SingularError : Error {
  explicit SingularError(const std::string& what) : Error(ErrorKind::Singular, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Degenerate regression input (e.g. all abscissae equal).
struct FitError : Error {
  explicit FitError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

}  // namespace dc
