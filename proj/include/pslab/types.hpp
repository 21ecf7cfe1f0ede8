#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pslab {

inline constexpr const char* kVersion = "0.1.0";

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace pslab
