#pragma once

#include "hexctl/types.hpp"
#include "hexctl/wrench_model.hpp"

namespace hexctl {

struct RigidBodyState {
  Vec3 x = Vec3::Zero();      ///< inertial position [m]
  Vec3 v = Vec3::Zero();      ///< inertial velocity [m/s]
  Mat3 R = Mat3::Identity();  ///< body-to-inertial rotation
  Vec3 omega = Vec3::Zero();  ///< body angular velocity [rad/s]
};

struct InertiaParams {
  double m;  ///< mass [kg]
  Mat3 J;    ///< inertia about the CoM, body frame [kg m^2]
};

struct PayloadSpec {
  double mass = 0.0;
  Vec3 offset = Vec3::Zero();          ///< attachment point relative to vehicle CoM [m]
  Mat3 shape_inertia = Mat3::Zero();   ///< payload inertia about its own CoM
};

/// S(w) such that S(w) a = w x a.
Mat3 skew(const Vec3& omega);

/// Inverse of skew; throws NotSkew unless ||S + S^T|| <= 1e-6 ||S||.
Vec3 unskew(const Mat3& S);

/// Rodrigues rotation for an axis-angle vector.
Mat3 so3_exp(const Vec3& phi);

struct StateDerivative {
  Vec3 x_dot;
  Vec3 v_dot;
  Vec3 omega_dot;
};

/// Newton-Euler equations in microgravity: no gravity term exists here.
StateDerivative dynamics_derivative(const RigidBodyState& s, const Wrench& w,
                                    const InertiaParams& ip);

/// One classical 4th-order step with the rotation advanced multiplicatively
/// on SO(3); the wrench is held constant across the step.
RigidBodyState integrate_step(const RigidBodyState& s, const Wrench& w,
                              const InertiaParams& ip, double dt);

struct CompositeBody {
  InertiaParams inertia;  ///< combined mass and J about the combined CoM
  Vec3 com_shift;         ///< combined CoM relative to the vehicle CoM [m]
};

/// Parallel-axis composition of the vehicle with a rigidly attached payload.
CompositeBody composite_inertia(const InertiaParams& base,
                                const PayloadSpec& payload);

}  // namespace hexctl
