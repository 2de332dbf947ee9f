#pragma once

#include <stdexcept>
#include <string>

namespace schurpower {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad table, bad coloring, inconsistent sizes.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The tuple domain would exceed the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// A search or refinement ran past its node or time budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A computed object failed a property it must have.  Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace schurpower
