#pragma once

#include <stdexcept>
#include <string>

namespace phev {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: unknown node, bad link, invalid parameter, bad file row.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Simple-path enumeration would exceed its configured limit.
class EnumerationOverflow : public Error {
 public:
  using Error::Error;
};

// No origin -> destination route exists.
class Unreachable : public Error {
 public:
  using Error::Error;
};

// The LP/MILP engine gave up (iteration or node limit) or hit an internal fault.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace phev
