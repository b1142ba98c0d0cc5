#include "hexctl/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace hexctl {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double geodesic_angle(const Mat3& R, const Mat3& R_d) {
  const double tr = (R_d.transpose() * R).trace();
  return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

}  // namespace

double NoiseRng::normal() {
  const double u1 = 1.0 - uniform01(state_);  // (0, 1]
  const double u2 = uniform01(state_);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RigidBodyState perturb_measurement(const RigidBodyState& s, const NoiseModel& nm,
                                   NoiseRng& rng) {
  RigidBodyState out = s;
  for (int i = 0; i < 3; ++i) out.x(i) += nm.sigma_x * rng.normal();
  for (int i = 0; i < 3; ++i) out.v(i) += nm.sigma_v * rng.normal();
  Vec3 eta;
  for (int i = 0; i < 3; ++i) eta(i) = nm.sigma_att * rng.normal();
  out.R = so3_exp(eta) * s.R;
  for (int i = 0; i < 3; ++i) out.omega(i) += nm.sigma_omega * rng.normal();
  return out;
}

ScenarioLog run_scenario(const Scenario& sc) {
  const ActuationMatrix am = build_actuation_matrix(sc.design);
  if (!am.invertible()) throw SingularDesign("scenario design is singular");
  if (sc.waypoints.empty()) throw Error("scenario has no waypoints");

  // Plant state tracks the composite CoM; without payload the shift is zero.
  InertiaParams plant_inertia = sc.inertia;
  Vec3 com = Vec3::Zero();
  if (sc.payload && sc.payload->mass > 0.0) {
    const CompositeBody body = composite_inertia(sc.inertia, *sc.payload);
    plant_inertia = body.inertia;
    com = body.com_shift;
  }

  RigidBodyState plant;
  plant.R = sc.initial.R;
  plant.omega = sc.initial.omega;
  plant.x = sc.initial.x + sc.initial.R * com;
  plant.v = sc.initial.v + sc.initial.R * sc.initial.omega.cross(com);

  NoiseRng rng(sc.noise ? sc.noise->seed : 0);

  ScenarioLog log;
  const int n_steps = static_cast<int>(std::ceil(sc.t_max / sc.dt));
  log.rows.reserve(n_steps);

  std::size_t wp_index = 0;
  double hold_start = -1.0;

  for (int k = 0; k < n_steps; ++k) {
    const double t = k * sc.dt;

    RigidBodyState vehicle;
    vehicle.R = plant.R;
    vehicle.omega = plant.omega;
    vehicle.x = plant.x - plant.R * com;
    vehicle.v = plant.v - plant.R * plant.omega.cross(com);

    const RigidBodyState measured =
        sc.noise ? perturb_measurement(vehicle, *sc.noise, rng) : vehicle;

    const Waypoint& wp = sc.waypoints[wp_index];
    Setpoint sp;
    sp.x_d = wp.x_d;
    sp.R_d = wp.attitude_d;

    LogRow row;
    row.t = t;
    row.true_state = vehicle;
    row.measured = measured;
    row.setpoint = sp;

    WrenchCommand cmd;
    try {
      cmd = wrench_command(measured, sp, sc.gains, sc.inertia, am, sc.policy);
      row.e_R = attitude_error(measured.R, sp.R_d);
    } catch (const AttitudeSingularity&) {
      log.failed = true;
      log.failure = "attitude_singularity";
      break;
    }
    row.e_x = measured.x - sp.x_d;
    row.e_v = measured.v - sp.v_d;
    row.e_omega = measured.omega - sp.omega_d;
    row.u = cmd.u.u;
    row.saturated = cmd.saturated;
    log.rows.push_back(row);

    // Waypoint progress judged on the true state.
    const bool inside = (vehicle.x - wp.x_d).norm() <= wp.pos_tol &&
                        geodesic_angle(vehicle.R, wp.attitude_d) <= wp.att_tol;
    if (inside) {
      if (hold_start < 0.0) hold_start = t;
      if (t - hold_start >= wp.hold) {
        log.waypoint_times.push_back(hold_start);
        ++wp_index;
        hold_start = -1.0;
        if (wp_index == sc.waypoints.size()) {
          log.completed = true;
          break;
        }
      }
    } else {
      hold_start = -1.0;
    }

    Wrench plant_wrench = cmd.applied;
    plant_wrench.M -= com.cross(cmd.applied.F);
    plant = integrate_step(plant, plant_wrench, plant_inertia, sc.dt);
  }

  return log;
}

Metrics summarize_metrics(const ScenarioLog& log) {
  if (log.rows.empty()) throw EmptyLog("scenario log has no rows");

  Metrics m;
  m.waypoint_settling = log.waypoint_times;
  m.completed = log.completed;
  m.duration = log.rows.back().t;

  int saturated = 0;
  double peak_pos = 0.0;
  for (const auto& row : log.rows) {
    peak_pos = std::max(peak_pos, row.e_x.norm());
    m.peak_att_error = std::max(m.peak_att_error, row.e_R.norm());
    if (row.saturated) ++saturated;
  }
  m.peak_pos_error = peak_pos;
  m.saturated_fraction = static_cast<double>(saturated) / log.rows.size();

  const Vec3 e0 = log.rows.front().e_x;
  if (e0.norm() > 0.0) {
    const Vec3 dir = e0.normalized();
    double worst = 0.0;
    for (const auto& row : log.rows) {
      worst = std::min(worst, row.e_x.dot(dir));
    }
    m.overshoot = std::max(0.0, -worst) / e0.norm();
  }

  // Least-squares fit of ln||e_x|| over the decaying range.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    const double floor = 1e-4 * std::max(peak_pos, 1e-300);
    for (const auto& row : log.rows) {
      const double norm = row.e_x.norm();
      if (norm <= floor) continue;
      const double y = std::log(norm);
      sx += row.t;
      sy += y;
      sxx += row.t * row.t;
      sxy += row.t * y;
      syy += y * y;
      ++n;
    }
    if (n >= 2) {
      const double denom = n * sxx - sx * sx;
      if (denom > 0.0) {
        const double slope = (n * sxy - sx * sy) / denom;
        m.fit_rate = -slope;
        const double ss_tot = syy - sy * sy / n;
        const double intercept = (sy - slope * sx) / n;
        double ss_res = 0.0;
        for (const auto& row : log.rows) {
          const double norm = row.e_x.norm();
          if (norm <= floor) continue;
          const double r = std::log(norm) - (slope * row.t + intercept);
          ss_res += r * r;
        }
        m.fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
      }
    }
  }

  const double t_end = log.rows.back().t;
  const double window = std::max(1.0, 0.05 * t_end);
  double acc = 0.0;
  int count = 0;
  for (const auto& row : log.rows) {
    if (row.t >= t_end - window) {
      acc += row.e_x.norm();
      ++count;
    }
  }
  m.mean_steady_pos_error = count > 0 ? acc / count : 0.0;
  return m;
}

}  // namespace hexctl
