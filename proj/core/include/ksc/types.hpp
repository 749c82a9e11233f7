#pragma once

#include <Eigen/Dense>

namespace ksc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace ksc
