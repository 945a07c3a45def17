#pragma once

#include <stdexcept>
#include <string>

namespace ssploc {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorKind : int {
  argument = 1,
  config = 2,
  data = 3,
  internal = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_argument(const std::string& what) {
  throw Error(ErrorKind::argument, what);
}
[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorKind::config, what);
}
[[noreturn]] inline void throw_data(const std::string& what) {
  throw Error(ErrorKind::data, what);
}
[[noreturn]] inline void throw_internal(const std::string& what) {
  throw Error(ErrorKind::internal, what);
}

}  // namespace ssploc
