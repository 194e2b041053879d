#pragma once

#include <stdexcept>
#include <string>

namespace nnverify {

enum class ErrorCode {
  invalid_argument,
  format_mismatch,
  division_by_zero,
  shape_mismatch,
  parse_error,
  io_error,
  infeasible_region,
};

/// Base exception for every reported failure in the toolkit.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Parse failure in a text input; carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(int line, const std::string &what)
      : Error(ErrorCode::parse_error,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

} // namespace nnverify
