#pragma once

#include <stdexcept>
#include <string>

namespace qpr {

/// Failure categories. The CLI maps each category onto a process exit code.
enum class ErrorKind {
  invalid_parameter,
  shape,
  step_size,
  convergence,
  basis_construction,
  accuracy,
  representation,
  geometry,
  timeout,
  extraction,
  config,
  io,
  integrity,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace qpr
