#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace confokit {

// Base of all toolkit failures. The CLI maps resource_error to exit code 2
// and every other subclass to exit code 1.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes (CSV, XML, JSON). Carries the byte offset or line
// number where the reader gave up.
class parse_error : public error {
 public:
  parse_error(const std::string& message, std::size_t byte_offset)
      : error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  explicit parse_error(const std::string& message) : error(message), byte_offset_(0) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// A declared name (column, attribute) does not exist or has the wrong type.
class schema_error : public error {
 public:
  using error::error;
};

// Structurally invalid data: dangling arc, bad marking, invalid descriptor.
class validation_error : public error {
 public:
  using error::error;
};

// A token-game step whose precondition does not hold (firing a disabled
// transition).
class execution_error : public error {
 public:
  using error::error;
};

// Caller passed an argument outside the operation's domain.
class argument_error : public error {
 public:
  using error::error;
};

// The model cannot support the requested operation (ambiguous labels,
// unreachable final marking).
class model_error : public error {
 public:
  using error::error;
};

// A configured search bound was exhausted.
class resource_error : public error {
 public:
  resource_error(const std::string& message, std::size_t budget)
      : error(message + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

}  // namespace confokit
