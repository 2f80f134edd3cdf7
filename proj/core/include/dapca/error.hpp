#pragma once

#include <stdexcept>
#include <string>

namespace dapca {

/// Malformed input: bad files, inconsistent shapes, invalid parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that cannot proceed on otherwise well-formed input.
/// Carries the name of the pipeline stage that failed.
class FitError : public std::runtime_error {
 public:
  FitError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace dapca
