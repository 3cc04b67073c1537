#pragma once

#include <stdexcept>

namespace daaf {

/// Invalid bandit instance, delay model, policy or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation precondition (arm out of range, play past T).
class UsageError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A derived quantity is undefined for the instance (e.g. infinite KL).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace daaf
