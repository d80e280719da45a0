#ifndef CAPWAVE_ERRORS_HPP
#define CAPWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace capwave {

// Iterative scheme failed to reach its tolerance (root finding, Newton,
// adaptive integration step underflow).
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An assembled linear system could not be factorized or solved.
class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A flow state left the admissible set (min eta at or below the floor).
class inadmissible_state : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A certificate's convergence checks did not hold.
class certificate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace capwave

#endif  // CAPWAVE_ERRORS_HPP
