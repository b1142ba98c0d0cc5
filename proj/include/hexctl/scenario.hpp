#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hexctl/flight_control.hpp"
#include "hexctl/rigid_body.hpp"
#include "hexctl/types.hpp"
#include "hexctl/wrench_model.hpp"

namespace hexctl {

/// Gaussian measurement noise; sigmas are standard deviations.
struct NoiseModel {
  double sigma_x = 0.02;                    ///< [m]
  double sigma_v = 0.02;                    ///< [m/s]
  double sigma_att = 5.0 * M_PI / 180.0;    ///< [rad]
  double sigma_omega = 1.0 * M_PI / 180.0;  ///< [rad/s]
  std::uint64_t seed = 0;
};

/// Deterministic Gaussian stream (splitmix64 + Box-Muller), so logs are
/// byte-identical across platforms for a given seed.
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : state_(seed) {}
  double normal();

 private:
  std::uint64_t state_;
};

RigidBodyState perturb_measurement(const RigidBodyState& s, const NoiseModel& nm,
                                   NoiseRng& rng);

struct Waypoint {
  Vec3 x_d = Vec3::Zero();
  Mat3 attitude_d = Mat3::Identity();
  double pos_tol = 0.05;                 ///< [m]
  double att_tol = 3.0 * M_PI / 180.0;   ///< geodesic angle [rad]
  double hold = 0.5;                     ///< [s] continuously inside tolerance
};

struct Scenario {
  DesignConfig design;
  InertiaParams inertia{6.05, Mat3::Identity() * 0.08};
  ControlGains gains;
  RigidBodyState initial;
  std::vector<Waypoint> waypoints;  ///< a single setpoint is a 1-waypoint list
  std::optional<NoiseModel> noise;
  std::optional<PayloadSpec> payload;
  double dt = 1e-3;
  double t_max = 60.0;
  SaturationPolicy policy = SaturationPolicy::kScale;
};

struct LogRow {
  double t;
  RigidBodyState true_state;   ///< vehicle-origin state
  RigidBodyState measured;
  Setpoint setpoint;
  Vec3 e_x, e_v, e_R, e_omega;  ///< controller (measured) errors
  Vec6 u;
  bool saturated;
};

struct ScenarioLog {
  std::vector<LogRow> rows;
  std::vector<double> waypoint_times;  ///< settling time per achieved waypoint
  bool completed = false;
  bool failed = false;
  std::string failure;
};

/// Measure (optionally noisy) -> control with nominal inertia -> integrate the
/// (possibly payload-composite) plant -> log; stops at t_max or when every
/// waypoint has been held inside tolerance.
ScenarioLog run_scenario(const Scenario& sc);

struct Metrics {
  std::vector<double> waypoint_settling;
  double peak_pos_error = 0.0;
  double peak_att_error = 0.0;
  double overshoot = 0.0;  ///< fraction of the initial error overshot past zero
  double saturated_fraction = 0.0;
  double fit_rate = 0.0;  ///< exponential decay rate of ||e_x||
  double fit_r2 = 0.0;
  double mean_steady_pos_error = 0.0;  ///< mean ||e_x|| near the end of the run
  double duration = 0.0;
  bool completed = false;
};

Metrics summarize_metrics(const ScenarioLog& log);

}  // namespace hexctl
