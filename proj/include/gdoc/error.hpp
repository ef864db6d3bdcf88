#pragma once

#include <stdexcept>
#include <string>

namespace gdoc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An explicit computational cap was exceeded (subset sums, dense dimensions, enumerations).
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gdoc
