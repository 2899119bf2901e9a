#pragma once

#include <stdexcept>
#include <string>

namespace shepp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SHEPP_DECLARE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

SHEPP_DECLARE_ERROR(DomainError);
SHEPP_DECLARE_ERROR(OutOfTableRange);
SHEPP_DECLARE_ERROR(QuadratureFailure);
SHEPP_DECLARE_ERROR(DegenerateVariance);
SHEPP_DECLARE_ERROR(FitFailure);
SHEPP_DECLARE_ERROR(EmbeddingFailure);
SHEPP_DECLARE_ERROR(IncommensurateGrid);
SHEPP_DECLARE_ERROR(CholeskyFailure);
SHEPP_DECLARE_ERROR(IoError);

#undef SHEPP_DECLARE_ERROR

/// Configuration error carrying the 1-based line of the offending entry (0 if unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace shepp
