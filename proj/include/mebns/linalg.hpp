#pragma once

#include <Eigen/Dense>

namespace mebns {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace mebns
