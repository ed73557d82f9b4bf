#pragma once

#include <stdexcept>
#include <string>

namespace safe_explore {

/// Index outside the valid range of arms, states or actions.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numeric parameter outside its admissible domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation requested on a state that cannot support it (e.g. empty candidate set).
class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Assured agent reached a state whose every action is condemned.
class DeadStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, map or configuration input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace safe_explore
