#pragma once

#include <stdexcept>
#include <string>

namespace coarsemed {

/// Malformed or inconsistent input: unknown identifiers, non-total tables,
/// schema violations, specs that fail their module validator.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exponential search was asked to run beyond its configured size cap.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The arguments are well formed but do not satisfy an operation's premises.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coarsemed
