#pragma once

#include <Eigen/Dense>

namespace pennet {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace pennet
