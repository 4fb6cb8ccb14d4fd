#include "core/error.hpp"

namespace metawave {

const char *error_code_name(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::parameter:
    return "parameter";
  case ErrorCode::config:
    return "config";
  case ErrorCode::degenerate:
    return "degenerate";
  case ErrorCode::geometry:
    return "geometry";
  case ErrorCode::resource:
    return "resource";
  case ErrorCode::solver:
    return "solver";
  case ErrorCode::accuracy:
    return "accuracy";
  case ErrorCode::resonance:
    return "resonance";
  case ErrorCode::consistency:
    return "consistency";
  }
  return "unknown";
}

ErrorCode parse_error_code(std::string_view name) noexcept {
  for (ErrorCode c : {ErrorCode::parameter, ErrorCode::config, ErrorCode::degenerate,
                      ErrorCode::geometry, ErrorCode::resource, ErrorCode::solver,
                      ErrorCode::accuracy, ErrorCode::resonance, ErrorCode::consistency})
    if (name == error_code_name(c))
      return c;
  return ErrorCode::solver;
}

} // namespace metawave
