#pragma once

#include <stdexcept>
#include <string>

namespace stackelberg {

// Vector dimensions disagree with the game or with each other.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid parameter values (probabilities outside [0,1], non-positive costs, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A run produced a non-finite iterate or loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long epoch)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

  long epoch() const { return epoch_; }

 private:
  long epoch_;
};

// A diagnostic was requested that needs an oracle the game does not provide.
class DiagnosticUnavailable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace stackelberg
