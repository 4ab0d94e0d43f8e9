#pragma once

#include <stdexcept>
#include <string>

namespace fplinq {

enum class Errc {
  NotHermitian,
  NotPSD,
  Singular,
  NoBracket,
  DimensionMismatch,
  InvalidArgument,
  Unsupported,
  NonTermination,
};

const char* to_string(Errc code);

/// Numerical and contract failures raised by the library.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised for malformed experiment configuration; `field` is a dotted path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotPSD: return "NotPSD";
    case Errc::Singular: return "Singular";
    case Errc::NoBracket: return "NoBracket";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Unsupported: return "Unsupported";
    case Errc::NonTermination: return "NonTermination";
  }
  return "Unknown";
}

}  // namespace fplinq
