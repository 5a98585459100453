#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lapspec {

/// Base class for every error raised by the library. Carries the name of the
/// module that detected the problem so front ends can report provenance.
class Error : public std::runtime_error {
public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

private:
  std::string module_;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Numerical breakdown: non-SPD matrix, non-convergence, degenerate cell.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Expression syntax or semantic error. `offset` is the byte offset into the
/// source string where the problem was detected.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("coeff", what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

} // namespace lapspec
