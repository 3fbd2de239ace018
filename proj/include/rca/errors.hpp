#pragma once

#include <stdexcept>

namespace rca {

// Bad inputs or violated preconditions. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iteration or enumeration budget ran out before the solver reached a
// verdict. The CLI maps this to exit code 3.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rca
