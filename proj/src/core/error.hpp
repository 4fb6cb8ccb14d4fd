#pragma once

#include <stdexcept>
#include <string_view>
#include <string>

namespace metawave {

enum class ErrorCode {
  parameter,
  config,
  degenerate,
  geometry,
  resource,
  solver,
  accuracy,
  resonance,
  consistency,
};

/// Base exception for every failure raised by the core library. The code
/// is what crosses the C boundary; the message is for humans.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string &what) {
  if (!cond)
    fail(code, what);
}

const char *error_code_name(ErrorCode code) noexcept;
/// Inverse of error_code_name; unknown names map to ErrorCode::solver.
ErrorCode parse_error_code(std::string_view name) noexcept;

} // namespace metawave
