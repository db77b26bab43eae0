#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace discus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or infeasible configuration (negative weights, impossible masks, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Inconsistent array shapes between operands.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Non-finite input where finite values are required.
class NonFiniteError : public Error {
public:
  using Error::Error;
};

class CorruptArchiveError : public Error {
public:
  using Error::Error;
};

class UnsupportedFormatError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// A quantity is mathematically undefined for the given input
/// (zero-energy SNR, zero-norm NMSE reference, all-zero normalization).
class UndefinedError : public Error {
public:
  using Error::Error;
};

/// Iterative solver failure (divergence, SVD breakdown).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Training diverged; carries the loss trace collected so far.
class TrainingFailure : public Error {
public:
  TrainingFailure(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}

  const std::vector<double>& trace() const noexcept { return trace_; }

private:
  std::vector<double> trace_;
};

}  // namespace discus
