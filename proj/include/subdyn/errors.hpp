#pragma once

#include <stdexcept>
#include <string>

namespace subdyn {

// Every failure carries a category that the CLI maps to an exit status.
enum class ErrorKind {
  config,       // invalid input, exit 2
  convergence,  // quadrature or root finder gave up, exit 3
  invariant,    // an identity or consistency check failed, exit 4
  singular,     // a denominator or determinant vanished, exit 3
  contract,     // caller passed an unsupported argument
  resource      // problem too large for the configured caps
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace subdyn
