#pragma once

#include <stdexcept>
#include <string>

namespace lanebal {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorKind {
  kInvalidInput = 2,
  kInvariant = 3,
  kSolverLimit = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_input(const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, what);
}

[[noreturn]] inline void throw_invariant(const std::string& what) {
  throw Error(ErrorKind::kInvariant, what);
}

}  // namespace lanebal
