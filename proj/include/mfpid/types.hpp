#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mfpid {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Bad input: malformed config, infeasible problem, wrong dimensions.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Something blew up during a computation that was handed valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mfpid
