#pragma once

#include <Eigen/Dense>

namespace netfactor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace netfactor
