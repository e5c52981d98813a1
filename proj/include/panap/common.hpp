#pragma once

#include <stdexcept>
#include <string>

namespace panap {

// Exit-code taxonomy shared by the library and the CLI:
// 2 usage, 3 I/O, 4 data/schema, 5 numeric.
enum class ErrorKind { usage = 2, io = 3, data = 4, numeric = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }
  const char* code() const {
    switch (kind_) {
      case ErrorKind::usage: return "usage";
      case ErrorKind::io: return "io";
      case ErrorKind::data: return "data";
      case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void usage_error(const std::string& msg) {
  throw Error(ErrorKind::usage, msg);
}
[[noreturn]] inline void io_error(const std::string& msg) {
  throw Error(ErrorKind::io, msg);
}
[[noreturn]] inline void data_error(const std::string& msg) {
  throw Error(ErrorKind::data, msg);
}
[[noreturn]] inline void numeric_error(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}

}  // namespace panap
