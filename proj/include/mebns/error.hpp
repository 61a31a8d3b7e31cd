#pragma once

#include <stdexcept>
#include <string>

namespace mebns {

// Every failure the library can raise carries a category so the C boundary
// can map it onto a stable status code.
enum class ErrorKind {
  config,   // bad option value / inconsistent configuration
  io,       // file cannot be opened or written
  parse,    // malformed input data
  numeric,  // non-finite values where finite ones are required
  runtime,  // everything else that goes wrong while running
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  static Error config(const std::string& m) { return {ErrorKind::config, m}; }
  static Error io(const std::string& m) { return {ErrorKind::io, m}; }
  static Error parse(const std::string& m) { return {ErrorKind::parse, m}; }
  static Error numeric(const std::string& m) { return {ErrorKind::numeric, m}; }
  static Error runtime(const std::string& m) { return {ErrorKind::runtime, m}; }

 private:
  ErrorKind kind_;
};

}  // namespace mebns
