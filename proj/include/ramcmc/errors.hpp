#pragma once

#include <stdexcept>
#include <string>

namespace ramcmc {

/// A pivot of a Cholesky factorization fell below tolerance.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(std::string what, int pivot_index)
      : std::runtime_error(std::move(what)), pivot_index_(pivot_index) {}
  int pivot_index() const { return pivot_index_; }

 private:
  int pivot_index_;
};

/// A rank-one downdate would lose positive definiteness.
class DowndateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap.
class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(std::string what, int iterations)
      : std::runtime_error(std::move(what)), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingMetadata : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoExactSampler : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bracket expansion found no sign change for a root search.
class NoSignChange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Wraps any error raised inside a chain run with the iteration it occurred at.
class ChainError : public std::runtime_error {
 public:
  ChainError(std::string what, long iteration)
      : std::runtime_error(std::move(what)), iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

}  // namespace ramcmc
