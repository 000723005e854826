#pragma once

#include <stdexcept>
#include <string>

namespace cdii {

/// Base class for all toolkit failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A pointwise functional dropped below its admissibility threshold
/// (degenerate data, near-singular matrix, non-SPD reconstruction).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// A linear solve failed to reach the requested tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Container parsing / serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Error raised by the end-to-end pipeline; carries the stage name.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace cdii
