#pragma once

#include <stdexcept>
#include <string>

namespace ocm {

enum class ErrorCode {
  InvalidArgument = 1,
  Sizing = 2,
  OutOfBox = 3,
  DepthExceeded = 4,
  Io = 5,
  Parse = 6,
  UnknownSuite = 7,
};

/// Every failure raised by the library carries one of the codes above; the C
/// API maps them one-to-one onto ocm_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace ocm
