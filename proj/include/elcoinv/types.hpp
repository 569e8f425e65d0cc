#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace elcoinv {

using Complex = std::complex<double>;

using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2d;
using CMat2 = Eigen::Matrix2cd;

using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex iu{0.0, 1.0};

} // namespace elcoinv
