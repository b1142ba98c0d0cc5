#include "hexctl/flight_control.hpp"

#include <cmath>

namespace hexctl {

Vec3 position_control(const RigidBodyState& s, const Setpoint& sp,
                      const PositionGains& g, double mass) {
  const Vec3 e_x = s.x - sp.x_d;
  const Vec3 e_v = s.v - sp.v_d;
  const Vec3 p = -g.k_x * e_x - g.k_v * e_v;
  return mass * s.R.transpose() * p;
}

Vec3 attitude_error(const Mat3& R, const Mat3& R_d) {
  const Mat3 Rd_R = R_d.transpose() * R;
  const double tr = Rd_R.trace();
  if (tr <= -1.0 + 1e-9) {
    throw AttitudeSingularity("attitude error undefined near 180 degrees");
  }
  return unskew(Rd_R - Rd_R.transpose()) / (2.0 * std::sqrt(1.0 + tr));
}

Vec3 attitude_control(const RigidBodyState& s, const Setpoint& sp,
                      const AttitudeGains& g, const Mat3& J) {
  const Vec3 e_R = attitude_error(s.R, sp.R_d);
  const Mat3 R_Rd = s.R.transpose() * sp.R_d;
  const Vec3 omega_d_body = R_Rd * sp.omega_d;
  const Vec3 e_omega = s.omega - omega_d_body;
  return -g.k_R * e_R - g.k_omega * e_omega +
         skew(omega_d_body) * J * omega_d_body + J * R_Rd * sp.omega_dot_d;
}

WrenchCommand wrench_command(const RigidBodyState& s, const Setpoint& sp,
                             const ControlGains& gains, const InertiaParams& ip,
                             const ActuationMatrix& am, SaturationPolicy policy) {
  WrenchCommand cmd;
  cmd.commanded.F = position_control(s, sp, gains.pos, ip.m);
  cmd.commanded.M = attitude_control(s, sp, gains.att, ip.J);
  const AllocationResult alloc = allocate(am, cmd.commanded);
  const SaturationResult sat = saturate(alloc.u, policy);
  cmd.u = sat.u;
  cmd.saturated = sat.saturated;
  cmd.applied = forward_map(am, cmd.u);
  return cmd;
}

}  // namespace hexctl
