#pragma once

#include <stdexcept>
#include <string>

namespace cuspfit {

/// Parameter outside the valid knot domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Structurally invalid argument (bad sizes, bad ranges, shape mismatch).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Vanishing tangent cross product at a parameter location.
struct DegeneracyError : std::runtime_error {
  double u = 0.0;
  double v = 0.0;
  DegeneracyError(const std::string& msg, double u_, double v_)
      : std::runtime_error(msg), u(u_), v(v_) {}
};

/// File could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : std::runtime_error {
  std::string path;
  long line = 0;
  ParseError(const std::string& msg, std::string path_, long line_)
      : std::runtime_error(path_ + ":" + std::to_string(line_) + ": " + msg),
        path(std::move(path_)),
        line(line_) {}
};

/// Pre-alignment could not be computed (degenerate cloud).
struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cuspfit
