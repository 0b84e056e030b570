#pragma once

#include <stdexcept>
#include <string>

namespace mixpois {

// Parameter outside the family's structural domain (p >= 1, a <= 0, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of an operation (t < 0, z outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedFamily : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The mixing law fails its existence rule, so no PMF can be built from it.
class InvalidSpec : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NegativeProbability : public std::runtime_error {
 public:
  NegativeProbability(int n, double value);

  int index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  int index_;
  double value_;
};

class InsufficientMass : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace mixpois
