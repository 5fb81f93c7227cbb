#pragma once

#include <stdexcept>
#include <string>

namespace transition {

// Failure categories map onto the CLI exit codes (2, 3, 4).
enum class ErrorKind { Config, Numerical, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) {
  return Error(ErrorKind::Config, what);
}

inline Error numerical_error(const std::string& what) {
  return Error(ErrorKind::Numerical, what);
}

inline Error io_error(const std::string& what) {
  return Error(ErrorKind::Io, what);
}

}  // namespace transition
