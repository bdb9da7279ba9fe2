#pragma once

#include <stdexcept>
#include <string>

namespace dynspeckle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unrecognized container or image format (bad magic, wrong channel count).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Header parsed but payload shorter than declared.
class CorruptStackError : public Error {
 public:
  using Error::Error;
};

/// Header fields out of range (zero dims, unsupported version or depth).
class InvalidHeaderError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

class InsufficientFramesError : public Error {
 public:
  InsufficientFramesError(std::size_t required, std::size_t available);

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

/// Invalid parameter value. `field()` names the offending parameter when
/// known so front ends can point at it.
class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& message, std::string field = {});

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dynspeckle
