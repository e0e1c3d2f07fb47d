#pragma once

#include <stdexcept>
#include <string>

namespace holo {

/// Failure classes. Each maps to one CLI exit code.
enum class ErrorClass {
  Mathematical = 1,  ///< a mathematical precondition asserted by the caller is false
  Input = 2,         ///< malformed input, schema violations, I/O
  Numerical = 3,     ///< tolerance not met, quadrature did not converge
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), class_(cls), code_(std::move(code)) {}

  ErrorClass error_class() const noexcept { return class_; }
  /// Short machine-readable identifier, e.g. "PoleOnPath".
  const std::string& code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(class_); }

 private:
  ErrorClass class_;
  std::string code_;
};

inline Error input_error(const std::string& code, const std::string& what) {
  return Error(ErrorClass::Input, code, what);
}
inline Error numerical_error(const std::string& code, const std::string& what) {
  return Error(ErrorClass::Numerical, code, what);
}
inline Error math_error(const std::string& code, const std::string& what) {
  return Error(ErrorClass::Mathematical, code, what);
}

}  // namespace holo
