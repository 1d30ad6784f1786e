#pragma once

#include <stdexcept>
#include <string>

namespace gflow {

/// Input rejected by a precondition check (domain violation, bad parameter).
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation ran but could not deliver a usable result.
class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gflow
