#pragma once

#include <stdexcept>
#include <string>

namespace latdyn {

// Runtime numerical failures (as opposed to bad arguments / malformed input,
// which throw std::invalid_argument).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Covariance factorization failed even after the jitter ladder.
struct CovarianceFault : NumericError {
  explicit CovarianceFault(const std::string& msg) : NumericError(msg) {}
};

// Innovation covariance is numerically singular.
struct SingularInnovation : NumericError {
  explicit SingularInnovation(const std::string& msg) : NumericError(msg) {}
};

// Optimizer hit its iteration cap while still making progress, or the data
// cannot identify the parameters.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace latdyn
