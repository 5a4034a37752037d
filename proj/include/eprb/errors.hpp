#pragma once

#include <stdexcept>
#include <string>

namespace eprb {

/// A model broke a numerical contract (e.g. produced a probability of 1.3).
/// Bad arguments are reported with std::invalid_argument instead.
class ContractViolation : public std::runtime_error {
public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eprb
