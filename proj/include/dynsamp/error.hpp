#pragma once

#include <stdexcept>
#include <string>

namespace dynsamp {

enum class ErrorKind {
  invalid_argument,  // bad parameters or inconsistent dimensions
  parse,             // malformed input file
  io,                // filesystem failure
  numerical,         // solver did not meet its tolerance contract
  generation         // random generation exhausted its retry budget
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorKind::invalid_argument, msg);
}

}  // namespace dynsamp
