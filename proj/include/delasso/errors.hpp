#pragma once

#include <stdexcept>
#include <string>

namespace delasso {

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::invalid_argument {
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Nodewise regression produced tau_j^2 <= 0 for some node j.
struct DegenerateTau : std::runtime_error {
  int node;
  DegenerateTau(int j, const std::string& what) : std::runtime_error(what), node(j) {}
};

struct ZeroVariance : std::runtime_error {
  explicit ZeroVariance(const std::string& what) : std::runtime_error(what) {}
};

// Exact combinatorial evaluation requested beyond the enumeration caps.
struct TooLarge : std::invalid_argument {
  explicit TooLarge(const std::string& what) : std::invalid_argument(what) {}
};

struct NonFinite : std::runtime_error {
  explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IOError : std::runtime_error {
  explicit IOError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace delasso
