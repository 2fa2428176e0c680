#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rusgate {

// %g rendering for error messages.
inline std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: dimensions, ranges, malformed arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// The Fock truncation cannot represent the requested state or gate.
class CutoffTooSmall : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A measurement branch with (numerically) zero probability was requested.
class DegenerateOutcome : public Error {
 public:
  using Error::Error;
};

// Truncation leakage or loss of purity beyond tolerance during a simulation.
class NumericalDegradation : public Error {
 public:
  using Error::Error;
};

}  // namespace rusgate
