#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsplace {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the offending location.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Netlist references that cannot be resolved (bad instance ids, missing pins).
class NetlistError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsplace
