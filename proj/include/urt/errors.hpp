#pragma once

#include <stdexcept>
#include <string>

namespace urt {

// Invalid arguments are reported with std::invalid_argument and domain
// violations of the bound formulas with std::domain_error. The types below
// cover the remaining failure classes the CLI maps onto exit codes.

/// A request exceeded a resource guard (enumeration size, convolution length).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic was requested on an empty level.
class EmptyLevelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic needs at least one edge.
class NoEdgesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Permutation is not the image of any recursive tree.
class NotInImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed binary tree dump.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace urt
