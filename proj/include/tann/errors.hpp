#pragma once

#include <stdexcept>
#include <string>

namespace tann {

/// Shape or width mismatch between a value and the layer consuming it.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller violated an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Operation requires a trie shape the given trie does not have (e.g. empty).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numeric argument outside the mathematical domain of the function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file parsed but its contents are unusable.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tann
