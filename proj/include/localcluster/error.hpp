#pragma once

#include <stdexcept>
#include <string>

namespace localcluster {

/// Raised when caller-supplied data or parameters violate a precondition.
class InvalidArgument : public std::invalid_argument {
public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical routine cannot produce a finite answer.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace localcluster
