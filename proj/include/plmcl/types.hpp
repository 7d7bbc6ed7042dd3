#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace plmcl {

using Real = double;
using Index = Eigen::Index;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ArrayX = Eigen::ArrayXd;
using IntMatrix = Eigen::MatrixXi;
using IntVector = Eigen::VectorXi;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Row of a column-major IntMatrix, accepted without copying.
using IntRowRef = Eigen::Ref<const IntVector, 0, Eigen::InnerStride<>>;
using RowRef = Eigen::Ref<const Vector, 0, Eigen::InnerStride<>>;

}  // namespace plmcl
