#pragma once

#include <stdexcept>
#include <string>

namespace nvp1 {

// Config / input file violates the documented schema.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver failed to converge.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A requested constraint cannot be satisfied (empty conditional sample,
// infeasible success-rate bound, abort-always policies, ...).
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Eigenvector labelling could not be resolved (best overlap below threshold).
struct LabelingError : std::runtime_error {
  explicit LabelingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nvp1
