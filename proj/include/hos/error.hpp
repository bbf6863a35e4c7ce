#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hos {

// Base error for every failure the library raises deliberately.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user input: bad scheme parameters, malformed config, size mismatches.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// Linear or nonlinear solve broke down (singular matrix, Newton stall).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

class NewtonFailure : public NumericalError {
 public:
  NewtonFailure(const std::string& what, std::vector<double> residuals)
      : NumericalError(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

}  // namespace hos
