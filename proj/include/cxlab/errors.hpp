#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cxlab {

/// A node lies outside the domain it is used with, or two arguments live on
/// different domains.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A verifier's precondition failed. `witness()` names the offending node
/// in literal syntax when there is one.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& condition, std::string witness = {})
      : std::invalid_argument(witness.empty() ? condition : condition + " (witness " + witness + ")"),
        condition_(condition),
        witness_(std::move(witness)) {}

  const std::string& condition() const noexcept { return condition_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string condition_;
  std::string witness_;
};

/// Bad user-supplied parameter (admissible values are in the message).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An instance would exceed the configured memory/size budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t required, std::size_t limit)
      : std::runtime_error(what + ": needs " + std::to_string(required) + ", limit " +
                           std::to_string(limit)),
        required_(required),
        limit_(limit) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t required_;
  std::size_t limit_;
};

}  // namespace cxlab
