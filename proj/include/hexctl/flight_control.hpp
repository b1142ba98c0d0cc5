#pragma once

#include "hexctl/rigid_body.hpp"
#include "hexctl/types.hpp"
#include "hexctl/wrench_model.hpp"

namespace hexctl {

struct PositionGains {
  double k_x;  ///< proportional [1/s^2]
  double k_v;  ///< derivative [1/s]
};

struct AttitudeGains {
  double k_R;
  double k_omega;
};

struct ControlGains {
  PositionGains pos{4.0, 4.0};
  AttitudeGains att{8.0, 2.5};
};

struct Setpoint {
  Vec3 x_d = Vec3::Zero();
  Vec3 v_d = Vec3::Zero();
  Mat3 R_d = Mat3::Identity();
  Vec3 omega_d = Vec3::Zero();
  Vec3 omega_dot_d = Vec3::Zero();
};

/// Feedback-linearized PD: F = m R^T (-k_x e_x - k_v e_v), body frame.
Vec3 position_control(const RigidBodyState& s, const Setpoint& sp,
                      const PositionGains& g, double mass);

/// e_R = unskew(R_d^T R - R^T R_d) / (2 sqrt(1 + tr(R_d^T R))).
/// Throws AttitudeSingularity at the 180-degree singularity of the scaling.
Vec3 attitude_error(const Mat3& R, const Mat3& R_d);

Vec3 attitude_control(const RigidBodyState& s, const Setpoint& sp,
                      const AttitudeGains& g, const Mat3& J);

struct WrenchCommand {
  ActuationVector u;
  Wrench commanded;  ///< controller output before allocation
  Wrench applied;    ///< what the plant receives after saturation
  bool saturated;
};

/// Control -> allocate -> saturate -> forward map.
WrenchCommand wrench_command(const RigidBodyState& s, const Setpoint& sp,
                             const ControlGains& gains, const InertiaParams& ip,
                             const ActuationMatrix& am, SaturationPolicy policy);

}  // namespace hexctl
