#pragma once

#include <stdexcept>
#include <string>

namespace mmwave {

/// Invalid scenario or experiment parameters (bad probabilities, unknown ids).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A closed form evaluated outside its mathematical domain (e.g. ln(1/0)).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Floating-point trouble that would otherwise be silently clamped.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A geometric query that reaches outside the sampled window.
class WindowError : public std::out_of_range {
public:
  explicit WindowError(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace mmwave
