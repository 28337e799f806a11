#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rfim {

enum class ErrorKind {
  invalid_argument,  // bad parameter at a call site
  capacity,          // resource guard tripped (enumeration cap, volume cap)
  validation,        // plan/config document rejected
  execution,         // runtime failure (quadrature budget, io mid-run)
  io                 // file system problem
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace rfim
