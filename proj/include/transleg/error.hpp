#pragma once

#include <stdexcept>
#include <string>

namespace transleg {

/// Malformed or invalid robot model (parse failure, dangling reference, unknown chain).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes that do not match the chain they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure of an analysis step on otherwise well-formed input.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No pair of points fell inside the match radius.
class EmptyMatchError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

/// Data file (log, stream, plan) that cannot be parsed or breaks its invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace transleg
