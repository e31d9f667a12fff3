#pragma once

#include <stdexcept>
#include <string>

namespace cjsr {

// Incompatible or invalid operand shapes.
class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite data, iteration caps, resource guards.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cjsr
