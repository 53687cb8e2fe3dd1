#pragma once

#include <stdexcept>
#include <string>

namespace netvis {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model / experiment parameters (alpha_p <= 0, rank beyond node count, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API misuse: out-of-range index, wrong kernel kind for an operation.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A state that the growth invariants rule out, e.g. zero total attachment weight.
class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Config-text error; carries the offending key and 1-based line (0 when not line-bound).
class ParseError : public Error {
 public:
  ParseError(std::string key, std::size_t line, const std::string& what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, std::size_t line, const std::string& what) {
    std::string msg = "config";
    if (line > 0) msg += " line " + std::to_string(line);
    if (!key.empty()) msg += " key '" + key + "'";
    return msg + ": " + what;
  }

  std::string key_;
  std::size_t line_;
};

}  // namespace netvis
