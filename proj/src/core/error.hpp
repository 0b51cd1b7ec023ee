#pragma once

#include <stdexcept>
#include <string>

namespace fpnet {

enum class ErrorCode {
  Dimension = 1,
  OutOfBand,
  Domain,
  Config,
  Io,
  NonFinite,
  InvalidArgument,
};

// All library failures surface as this type; the C API maps `code()` onto
// fpnet_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

// Literal messages skip the string construction on the passing path.
inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace fpnet
