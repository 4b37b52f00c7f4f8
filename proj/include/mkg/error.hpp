#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mkg {

enum class ErrorKind {
  argument,        // malformed call (i == j, index out of range, ...)
  domain,          // point or parameter outside the admissible set
  dimension,       // size mismatch between operands
  size_limit,      // lattice larger than the configured cap
  degenerate,      // coincident alphas, zero column norms, singular ansatz
  non_orthogonal,  // columns of U violate the weighted orthogonality
  no_real_solution // root finder could not certify d distinct real roots
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::domain: return "domain";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::size_limit: return "size_limit";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::non_orthogonal: return "non_orthogonal";
    case ErrorKind::no_real_solution: return "no_real_solution";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace mkg
