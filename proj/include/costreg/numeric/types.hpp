#pragma once

#include <Eigen/Dense>

namespace costreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

}  // namespace costreg
