#pragma once

#include <stdexcept>
#include <string>

namespace qia {

// Simulator misuse: consumed qubits, wrong-variant calls, mismatched spaces.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Caller-supplied data with the wrong shape (lengths, ranges, parameters).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration refused because the key length exceeds the cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FramingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A qubit token id was presented twice to an honest endpoint.
class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qia
