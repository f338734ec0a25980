#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace obskit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input that could not be parsed at all.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates an invariant. `field()` is a JSON-pointer-like path.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Failure of a geometric or numerical analysis on otherwise valid input.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Target and observer coincide, so bearing and range rate are undefined.
class ZeroRange : public AnalysisError {
 public:
  explicit ZeroRange(double time, std::optional<std::size_t> target = std::nullopt)
      : AnalysisError(message(time, target)), time_(time), target_(target) {}

  double time() const noexcept { return time_; }
  std::optional<std::size_t> target() const noexcept { return target_; }

 private:
  static std::string message(double time, std::optional<std::size_t> target) {
    std::string msg = "zero range at t=" + std::to_string(time);
    if (target) msg += " (target " + std::to_string(*target) + ")";
    return msg;
  }

  double time_;
  std::optional<std::size_t> target_;
};

/// A Doppler-ambiguity spec produced a non-positive range on the window.
class NonPositiveRange : public AnalysisError {
 public:
  explicit NonPositiveRange(double time)
      : AnalysisError("constructed range is non-positive at t=" + std::to_string(time)),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A bearing-ambiguity scale factor was not strictly positive.
class NonPositiveAlpha : public AnalysisError {
 public:
  explicit NonPositiveAlpha(double time)
      : AnalysisError("scale factor alpha is non-positive at t=" + std::to_string(time)),
        time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace obskit
