#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace plidar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A point (or box corner) that must be in front of the camera is not.
class BehindCameraError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `line()` is 1-based when the error is tied to a line.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Scene generation could not place the requested objects within its retry budget.
class PlacementError : public Error {
 public:
  using Error::Error;
};

/// Precision/recall requested for a set with no valid ground truth.
class UndefinedRecallError : public Error {
 public:
  using Error::Error;
};

}  // namespace plidar
