#include "hexctl/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace hexctl {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

double deg(double rad) { return rad / kDegToRad; }

Vec3 vec3_from(const nlohmann::json& j, const std::string& key,
               const Vec3& fallback = Vec3::Zero()) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw Error("field '" + key + "' must be an array of 3 numbers");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Mat3 mat3_from(const nlohmann::json& j) {
  if (j.is_array() && j.size() == 3 && j[0].is_array()) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
  }
  throw Error("expected a 3x3 numeric array");
}

Mat3 attitude_from(const nlohmann::json& j) {
  if (j.contains("rpy_deg")) {
    const Vec3 rpy = vec3_from(j, "rpy_deg");
    return rotation_from_rpy_deg(rpy.x(), rpy.y(), rpy.z());
  }
  if (j.contains("R")) return mat3_from(j.at("R"));
  return Mat3::Identity();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Mat3 rotation_from_rpy_deg(double roll, double pitch, double yaw) {
  const auto rx = Eigen::AngleAxisd(roll * kDegToRad, Vec3::UnitX());
  const auto ry = Eigen::AngleAxisd(pitch * kDegToRad, Vec3::UnitY());
  const auto rz = Eigen::AngleAxisd(yaw * kDegToRad, Vec3::UnitZ());
  return (rz * ry * rx).toRotationMatrix();
}

nlohmann::json design_to_json(const DesignConfig& cfg) {
  nlohmann::json j;
  j["d"] = cfg.propellers[0].d;
  j["k1"] = cfg.k1;
  j["k2"] = cfg.k2;
  j["propellers"] = nlohmann::json::array();
  for (const auto& p : cfg.propellers) {
    j["propellers"].push_back(
        {{"theta_deg", deg(p.theta)}, {"phi_deg", deg(p.phi)}, {"w", p.w}});
  }
  return j;
}

DesignConfig design_from_json(const nlohmann::json& j) {
  DesignConfig cfg;
  const double d = j.at("d").get<double>();
  cfg.k1 = j.at("k1").get<double>();
  cfg.k2 = j.at("k2").get<double>();
  const auto& props = j.at("propellers");
  if (!props.is_array() || props.size() != 6) {
    throw Error("design must list exactly 6 propellers");
  }
  if (d <= 0.0 || cfg.k1 <= 0.0 || cfg.k2 < 0.0) {
    throw Error("design requires d > 0, k1 > 0, k2 >= 0");
  }
  for (int i = 0; i < 6; ++i) {
    const auto& p = props[i];
    const int w = p.at("w").get<int>();
    if (w != -1 && w != 1) throw Error("propeller spin w must be -1 or +1");
    cfg.propellers[i] = {p.at("theta_deg").get<double>() * kDegToRad,
                         p.at("phi_deg").get<double>() * kDegToRad, w, d};
  }
  return cfg;
}

DesignConfig load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open design file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("design file " + path.string() + ": " + e.what());
  }
  try {
    return design_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error("design file " + path.string() + ": " + e.what());
  }
}

void save_design(const std::filesystem::path& path, const DesignConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write design file: " + path.string());
  out << design_to_json(cfg).dump(2) << "\n";
}

Scenario scenario_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir) {
  Scenario sc;
  try {
    if (j.contains("design")) {
      sc.design = design_from_json(j.at("design"));
    } else if (j.contains("design_path")) {
      sc.design = load_design(base_dir / j.at("design_path").get<std::string>());
    } else {
      throw Error("scenario needs 'design' or 'design_path'");
    }

    if (j.contains("inertia")) {
      const auto& ji = j.at("inertia");
      sc.inertia.m = ji.at("m").get<double>();
      if (ji.contains("J_diag")) {
        sc.inertia.J = vec3_from(ji, "J_diag").asDiagonal();
      } else if (ji.contains("J")) {
        sc.inertia.J = mat3_from(ji.at("J"));
      }
      if (sc.inertia.m <= 0.0) throw Error("inertia.m must be positive");
    }

    if (j.contains("gains")) {
      const auto& jg = j.at("gains");
      sc.gains.pos.k_x = jg.value("kx", sc.gains.pos.k_x);
      sc.gains.pos.k_v = jg.value("kv", sc.gains.pos.k_v);
      sc.gains.att.k_R = jg.value("kr", sc.gains.att.k_R);
      sc.gains.att.k_omega = jg.value("kw", sc.gains.att.k_omega);
    }

    if (j.contains("initial")) {
      const auto& ji = j.at("initial");
      sc.initial.x = vec3_from(ji, "x");
      sc.initial.v = vec3_from(ji, "v");
      sc.initial.R = attitude_from(ji);
      sc.initial.omega = vec3_from(ji, "omega");
    }

    auto parse_waypoint = [](const nlohmann::json& jw) {
      Waypoint wp;
      wp.x_d = vec3_from(jw, "x");
      wp.attitude_d = attitude_from(jw);
      wp.pos_tol = jw.value("pos_tol", wp.pos_tol);
      wp.att_tol = jw.value("att_tol_deg", deg(wp.att_tol)) * kDegToRad;
      wp.hold = jw.value("hold", wp.hold);
      if (wp.pos_tol <= 0.0 || wp.att_tol <= 0.0) {
        throw Error("waypoint tolerances must be positive");
      }
      return wp;
    };
    if (j.contains("waypoints")) {
      for (const auto& jw : j.at("waypoints")) {
        sc.waypoints.push_back(parse_waypoint(jw));
      }
    } else if (j.contains("setpoint")) {
      sc.waypoints.push_back(parse_waypoint(j.at("setpoint")));
    }
    if (sc.waypoints.empty()) {
      throw Error("scenario needs 'waypoints' or 'setpoint'");
    }

    if (j.contains("noise") && !j.at("noise").is_null()) {
      const auto& jn = j.at("noise");
      NoiseModel nm;
      nm.sigma_x = jn.value("sigma_x", nm.sigma_x);
      nm.sigma_v = jn.value("sigma_v", nm.sigma_v);
      nm.sigma_att = jn.value("sigma_att_deg", deg(nm.sigma_att)) * kDegToRad;
      nm.sigma_omega =
          jn.value("sigma_omega_deg", deg(nm.sigma_omega)) * kDegToRad;
      nm.seed = jn.value("seed", std::uint64_t{0});
      if (nm.sigma_x < 0 || nm.sigma_v < 0 || nm.sigma_att < 0 ||
          nm.sigma_omega < 0) {
        throw Error("noise sigmas must be non-negative");
      }
      sc.noise = nm;
    }

    if (j.contains("payload") && !j.at("payload").is_null()) {
      const auto& jp = j.at("payload");
      PayloadSpec pl;
      pl.mass = jp.at("mass").get<double>();
      pl.offset = vec3_from(jp, "offset");
      if (jp.contains("shape_inertia_diag")) {
        pl.shape_inertia = vec3_from(jp, "shape_inertia_diag").asDiagonal();
      } else if (jp.contains("shape_inertia")) {
        pl.shape_inertia = mat3_from(jp.at("shape_inertia"));
      }
      if (pl.mass < 0.0) throw Error("payload mass must be non-negative");
      sc.payload = pl;
    }

    sc.dt = j.value("dt", sc.dt);
    sc.t_max = j.value("t_max", sc.t_max);
    if (sc.dt <= 0.0 || sc.t_max <= sc.dt) {
      throw Error("scenario requires dt > 0 and t_max > dt");
    }
    const std::string policy = j.value("saturation", std::string("scale"));
    if (policy == "scale") {
      sc.policy = SaturationPolicy::kScale;
    } else if (policy == "clamp") {
      sc.policy = SaturationPolicy::kClamp;
    } else {
      throw Error("saturation policy must be 'scale' or 'clamp'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j, path.parent_path());
}

void write_log_csv(std::ostream& os, const ScenarioLog& log) {
  os << "t,x,y,z,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,ex,ey,ez,"
        "er_x,er_y,er_z,u1,u2,u3,u4,u5,u6,sat\n";
  for (const auto& row : log.rows) {
    Eigen::Quaterniond q(row.true_state.R);
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    os << fmt(row.t);
    for (int i = 0; i < 3; ++i) os << ',' << fmt(row.true_state.x(i));
    for (int i = 0; i < 3; ++i) os << ',' << fmt(row.true_state.v(i));
    os << ',' << fmt(q.w()) << ',' << fmt(q.x()) << ',' << fmt(q.y()) << ','
       << fmt(q.z());
    for (int i = 0; i < 3; ++i) os << ',' << fmt(row.true_state.omega(i));
    for (int i = 0; i < 3; ++i) os << ',' << fmt(row.e_x(i));
    for (int i = 0; i < 3; ++i) os << ',' << fmt(row.e_R(i));
    for (int i = 0; i < 6; ++i) os << ',' << fmt(row.u(i));
    os << ',' << (row.saturated ? 1 : 0) << '\n';
  }
}

void write_log_csv(const std::filesystem::path& path, const ScenarioLog& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write log file: " + path.string());
  write_log_csv(out, log);
}

void write_front_csv(std::ostream& os, const ParetoFront& front) {
  os << "lambda,p,q,f_max,m_max,phi1_deg,phi2_deg,phi3_deg,phi4_deg,phi5_deg,"
        "phi6_deg,w1,w2,w3,w4,w5,w6,converged\n";
  for (const auto& pp : front.points) {
    os << fmt(pp.lambda);
    if (pp.converged) {
      os << ',' << fmt(pp.point.p) << ',' << fmt(pp.point.q) << ','
         << fmt(pp.point.f_max) << ',' << fmt(pp.point.m_max);
      for (int i = 0; i < 6; ++i) os << ',' << fmt(deg(pp.point.phi[i]));
      for (int i = 0; i < 6; ++i) os << ',' << pp.point.w.w[i];
      os << ",1\n";
    } else {
      for (int i = 0; i < 16; ++i) os << ',';
      os << "0\n";
    }
  }
}

void write_front_csv(const std::filesystem::path& path, const ParetoFront& front) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write front file: " + path.string());
  write_front_csv(out, front);
}

nlohmann::json metrics_to_json(const Metrics& m) {
  return {{"waypoint_settling", m.waypoint_settling},
          {"peak_pos_error", m.peak_pos_error},
          {"peak_att_error", m.peak_att_error},
          {"overshoot", m.overshoot},
          {"saturated_fraction", m.saturated_fraction},
          {"fit_rate", m.fit_rate},
          {"fit_r2", m.fit_r2},
          {"mean_steady_pos_error", m.mean_steady_pos_error},
          {"duration", m.duration},
          {"completed", m.completed}};
}

OptimizerSettings optimizer_settings_from_json(const nlohmann::json& j) {
  OptimizerSettings s;
  try {
    if (j.contains("phi_max_deg")) {
      s.phi_max = j.at("phi_max_deg").get<double>() * kDegToRad;
    }
    s.d = j.value("d", s.d);
    s.k_ratio = j.value("k_ratio", s.k_ratio);
    s.n_starts = j.value("n_starts", s.n_starts);
    s.seed = j.value("seed", s.seed);
    s.tol = j.value("tol", s.tol);
    s.max_evals = j.value("max_evals", s.max_evals);
    if (j.contains("lambda")) {
      s.lambda_grid = j.at("lambda").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("optimizer settings: ") + e.what());
  }
  if (s.phi_max <= 0.0 || s.phi_max >= M_PI / 2.0) {
    throw Error("phi_max must lie in (0, 90) degrees");
  }
  if (s.n_starts < 1) throw Error("n_starts must be at least 1");
  for (double l : s.lambda_grid) {
    if (l < 0.0 || l > 1.0) throw Error("lambda values must lie in [0, 1]");
  }
  return s;
}

}  // namespace hexctl
