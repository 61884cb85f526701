#pragma once

#include <stdexcept>
#include <string>

namespace weakseg {

/// Failure categories surfaced through the C API as status codes.
enum class ErrorKind {
  kInvalidArgument = 1,
  kIo = 2,
  kFormat = 3,
  kRuntime = 4,
  kDiverged = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& message) {
  return Error(ErrorKind::kInvalidArgument, message);
}
inline Error io_error(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}
inline Error format_error(const std::string& message) {
  return Error(ErrorKind::kFormat, message);
}
inline Error runtime_error(const std::string& message) {
  return Error(ErrorKind::kRuntime, message);
}

}  // namespace weakseg
