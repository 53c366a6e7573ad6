#pragma once

#include <stdexcept>
#include <string>

namespace tdaf {

/// Coarse failure classes. The C API and the CLI map these one-to-one onto
/// status codes and the `error[<category>]` line printed on failure.
enum class ErrorCategory {
  Config,      ///< invalid user configuration or unsupported option
  Structural,  ///< inconsistent sizes, indices out of range, corrupt mesh
  Parameter,   ///< numerical parameter outside its admissible range
  Solver,      ///< singular or inaccurate linear solve
  Newton,      ///< nonlinear iteration did not converge
  Io,          ///< file system failures
  Internal,
};

const char* category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what) : Error(ErrorCategory::Structural, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCategory::Parameter, what) {}
};

/// A linear solve failed. `pivot()` is the column of the vanishing pivot when
/// the factorization could locate it, -1 otherwise.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, long pivot)
      : Error(ErrorCategory::Solver, what), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

class NewtonError : public Error {
 public:
  explicit NewtonError(const std::string& what) : Error(ErrorCategory::Newton, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace tdaf
