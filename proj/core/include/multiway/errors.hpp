#pragma once

#include <stdexcept>
#include <string>

namespace multiway {

/// Invalid designs, families, configurations, or malformed input data.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation could not produce a trustworthy number: degenerate data
/// (zero within-cell variance) or a special-function evaluation that failed
/// to converge.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace multiway
