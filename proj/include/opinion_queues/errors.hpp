#pragma once

#include <stdexcept>
#include <string>

namespace oq {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite value produced during integration.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Formula evaluated outside its domain (e.g. omega = 0, mbar <= 0).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace oq
