#pragma once

#include <stdexcept>
#include <string>

namespace ksat {

// Enumeration size caps and similar resource limits.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ksat
