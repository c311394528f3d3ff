#pragma once

#include <stdexcept>
#include <string>

namespace meforge {

/// Thrown when an enumeration or convolution would exceed its size budget.
/// Exponential-growth paths must fail loudly instead of hanging.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace meforge
