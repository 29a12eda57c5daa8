#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace epsqp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A user callback returned NaN/Inf, or could not be evaluated.
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested capability (e.g. second derivatives) is not available.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem-document parsing failure; message carries the location.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace epsqp
