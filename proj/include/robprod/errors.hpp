#pragma once

#include <stdexcept>
#include <string>

namespace robprod {

// Malformed, inconsistent or missing input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation is undefined for the given input (rank deficiency,
// inadmissible reweighting parameters, singular covariance, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robprod
