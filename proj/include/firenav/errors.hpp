#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace firenav {

// Scenario or configuration violates an invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called in a state where it is not allowed (e.g. step after terminal).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed text input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Recorded data disagrees with re-simulation.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint file is truncated, has a bad magic or mismatching dimensions.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace firenav
