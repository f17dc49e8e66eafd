#pragma once

#include <stdexcept>
#include <string>

namespace fracdim {

// Bad arguments or violated preconditions.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request exceeds a configured size budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Malformed input file. row is 1-based, 0 when not tied to a row.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(row ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace fracdim
