#ifndef OPENWALK_ERROR_HPP
#define OPENWALK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace openwalk {

/// Base of every error raised while reading or checking input documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document: bad syntax, missing field, wrong type. The message
/// carries the line or field path.
class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Well-formed document whose content breaks an invariant.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace openwalk

#endif  // OPENWALK_ERROR_HPP
