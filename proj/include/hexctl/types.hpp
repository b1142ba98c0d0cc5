#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace hexctl {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Actuation matrix has rank < 6: the design cannot command all 6 DoF.
struct SingularDesign : Error {
  using Error::Error;
};

/// Direction vector is not unit length.
struct NotUnit : Error {
  using Error::Error;
};

/// Matrix passed to unskew is not skew-symmetric.
struct NotSkew : Error {
  using Error::Error;
};

/// tr(R_d^T R) at the -1 singularity of the attitude error scaling.
struct AttitudeSingularity : Error {
  using Error::Error;
};

/// Every multistart of an optimization subproblem failed to converge.
struct AllStartsFailed : Error {
  using Error::Error;
};

struct EmptyLog : Error {
  using Error::Error;
};

}  // namespace hexctl
