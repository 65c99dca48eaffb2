#pragma once
// Exception hierarchy shared by all animacy modules.
//
// Every error raised by the library derives from animacy::Error. The CLI maps
// the two coarse families (input-ish vs backend) onto process exit codes.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace animacy {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something unusable: bad offsets, wrong mask count, etc.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerically degenerate input, e.g. cosine of a zero vector.
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

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

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Replay backend asked for a request it has no recording of.
class FixtureMissError : public Error {
 public:
  using Error::Error;
};

// Transport or protocol failure talking to a model server.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, int attempts, int last_status)
      : Error(what), attempts_(attempts), last_status_(last_status) {}

  int attempts() const noexcept { return attempts_; }
  // HTTP status of the final attempt, or -1 when no response arrived.
  int last_status() const noexcept { return last_status_; }

 private:
  int attempts_;
  int last_status_;
};

}  // namespace animacy
