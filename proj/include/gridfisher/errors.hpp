#pragma once

#include <stdexcept>
#include <string>

namespace gridfisher {

// Invalid argument or parameter outside the admissible set.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A lattice sum needs a truncation radius beyond the configured cap.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A functional evaluated to a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The Fisher matrix is singular, so the Cramer-Rao bound is undefined.
class UnidentifiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridfisher
