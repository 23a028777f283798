#pragma once

#include <stdexcept>

namespace cascade {

// The dimension formulas and the simulator are only meaningful for
// subcritical weight models; anything else is rejected with this.
class regime_error : public std::domain_error {
  using std::domain_error::domain_error;
};

// Path or level outside the configured truncation depth.
class depth_error : public std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Query point that does not sit on the dyadic grid of the configuration.
class grid_error : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Regression window with too few usable scales.
class window_error : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Sequence input that violates a shape precondition (not decreasing,
// not positive, too short).
class shape_error : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Enumeration or traversal that would exceed a hard size guard.
class resource_error : public std::length_error {
  using std::length_error::length_error;
};

// A closed-form evaluation produced a value outside its provable range;
// indicates misuse of the formula, not bad user input.
class internal_error : public std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace cascade
