#pragma once

#include <Eigen/Dense>

namespace nsmooth {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<Vec>;
using ConstVecRef = Eigen::Ref<const Vec>;

}  // namespace nsmooth
