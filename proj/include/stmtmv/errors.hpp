#pragma once

#include <stdexcept>
#include <string>

namespace stmtmv {

// Bad arguments or malformed in-memory data (shape mismatches, out-of-range
// parameters, violated preconditions).
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed on-disk input; message names the offending file/line/column.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Bad experiment configuration (unknown keys, invalid values).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A solver diverged or a linear system could not be solved.
class NumericFailure : public std::runtime_error {
public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stmtmv
