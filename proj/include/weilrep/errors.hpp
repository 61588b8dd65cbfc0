#pragma once

#include <stdexcept>
#include <string>

namespace weilrep {

/// Raised when an operation is called outside its documented domain
/// (singular Gram matrix, non-isotropic subgroup, parity violation, ...).
class precondition_error : public std::invalid_argument {
public:
  explicit precondition_error(const std::string &what)
      : std::invalid_argument(what) {}
};

/// Raised when an exact internal identity fails, e.g. a Milgram magnitude
/// mismatch or a dimension formula that does not evaluate to an integer.
class consistency_error : public std::runtime_error {
public:
  explicit consistency_error(const std::string &what)
      : std::runtime_error(what) {}
};

} // namespace weilrep
