#pragma once

#include <stdexcept>
#include <string>

namespace dq {

enum class ErrorKind {
  domain,        // argument outside the mathematical domain
  precondition,  // caller broke an operation contract
  config,        // bad experiment configuration
  convergence,   // iterative solver gave up
  io
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dq
