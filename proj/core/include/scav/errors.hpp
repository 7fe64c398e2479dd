#pragma once

#include <stdexcept>

namespace scav {

/// An observation or input contradicts the probabilistic model
/// (e.g. an object reported absent from its only possible location).
class InconsistencyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested computation exceeds a configured tractability cap.
class InfeasibleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace scav
