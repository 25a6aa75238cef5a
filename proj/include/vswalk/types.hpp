#pragma once

#include <Eigen/Core>

namespace vswalk {

// Points and directions never exceed this dimension; fixed capacity keeps hot loops allocation-free.
inline constexpr int kMaxDim = 16;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::MatrixXd;

}  // namespace vswalk
