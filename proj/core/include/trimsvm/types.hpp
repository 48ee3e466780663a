#pragma once

#include <Eigen/Core>

namespace trimsvm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

}  // namespace trimsvm
