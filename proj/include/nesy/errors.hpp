#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nesy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  enum class Reason { Syntax, UnknownVariable, IndexOutOfRange };

  ParseError(Reason reason, std::size_t position, const std::string& what);

  Reason reason() const noexcept { return reason_; }
  /// Zero-based character offset into the formula text.
  std::size_t position() const noexcept { return position_; }

 private:
  Reason reason_;
  std::size_t position_;
};

/// Some concept vector is consistent with zero or several label vectors.
class NotWellFormed : public Error {
 public:
  NotWellFormed(std::uint32_t concept_code, int concepts, std::size_t consistent_labels);

  std::uint32_t concept_code() const noexcept { return concept_code_; }
  std::size_t consistent_labels() const noexcept { return consistent_labels_; }

 private:
  std::uint32_t concept_code_;
  std::size_t consistent_labels_;
};

/// Raised by the enumerator when the closed-form count exceeds the caller's limit.
/// The count is carried in decimal because it may not fit any machine integer.
class LimitExceeded : public Error {
 public:
  explicit LimitExceeded(std::string count);
  const std::string& count() const noexcept { return count_; }

 private:
  std::string count_;
};

class NoPins : public Error {
 public:
  NoPins();
};

class NonFinite : public Error {
 public:
  explicit NonFinite(int epoch);
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Malformed task file; line is 1-based.
class TaskFileError : public Error {
 public:
  TaskFileError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nesy
