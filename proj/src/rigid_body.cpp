#include "hexctl/rigid_body.hpp"

#include <cmath>

namespace hexctl {

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(),
      w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return s;
}

Vec3 unskew(const Mat3& S) {
  if ((S + S.transpose()).norm() > 1e-6 * S.norm()) {
    throw NotSkew("matrix is not skew-symmetric");
  }
  return {S(2, 1), S(0, 2), S(1, 0)};
}

Mat3 so3_exp(const Vec3& phi) {
  const double angle = phi.norm();
  const Mat3 S = skew(phi);
  double a, b;
  if (angle < 1e-6) {
    // sin(x)/x and (1-cos x)/x^2 series; keeps the small-angle branch exact
    // to beyond double precision.
    const double a2 = angle * angle;
    a = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
    b = 0.5 - a2 / 24.0 + a2 * a2 / 720.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  return Mat3::Identity() + a * S + b * S * S;
}

StateDerivative dynamics_derivative(const RigidBodyState& s, const Wrench& w,
                                    const InertiaParams& ip) {
  StateDerivative d;
  d.x_dot = s.v;
  d.v_dot = s.R * w.F / ip.m;
  d.omega_dot = ip.J.ldlt().solve(w.M - s.omega.cross(ip.J * s.omega));
  return d;
}

namespace {

// dexp^-1 of the incremental rotation: sigma_dot = omega - 1/2 sigma x omega
// + 1/12 sigma x (sigma x omega). sigma = O(dt) per step, so the truncation
// is beyond the integrator's own order.
Vec3 dexpinv(const Vec3& sigma, const Vec3& omega) {
  const Vec3 c1 = sigma.cross(omega);
  return omega - 0.5 * c1 + sigma.cross(c1) / 12.0;
}

struct Stage {
  Vec3 x, v, sigma, omega;
};

}  // namespace

RigidBodyState integrate_step(const RigidBodyState& s, const Wrench& w,
                              const InertiaParams& ip, double dt) {
  const Eigen::LDLT<Mat3> J_solver(ip.J);

  auto derive = [&](const Stage& y, Stage& dy) {
    dy.x = y.v;
    dy.v = (s.R * so3_exp(y.sigma)) * w.F / ip.m;
    dy.sigma = dexpinv(y.sigma, y.omega);
    dy.omega = J_solver.solve(w.M - y.omega.cross(ip.J * y.omega));
  };

  const Stage y0{s.x, s.v, Vec3::Zero(), s.omega};
  Stage k1, k2, k3, k4;
  derive(y0, k1);
  derive({y0.x + 0.5 * dt * k1.x, y0.v + 0.5 * dt * k1.v,
          y0.sigma + 0.5 * dt * k1.sigma, y0.omega + 0.5 * dt * k1.omega},
         k2);
  derive({y0.x + 0.5 * dt * k2.x, y0.v + 0.5 * dt * k2.v,
          y0.sigma + 0.5 * dt * k2.sigma, y0.omega + 0.5 * dt * k2.omega},
         k3);
  derive({y0.x + dt * k3.x, y0.v + dt * k3.v, y0.sigma + dt * k3.sigma,
          y0.omega + dt * k3.omega},
         k4);

  RigidBodyState out;
  out.x = s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  out.v = s.v + dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  const Vec3 sigma =
      dt / 6.0 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
  out.R = s.R * so3_exp(sigma);
  out.omega =
      s.omega + dt / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
  return out;
}

CompositeBody composite_inertia(const InertiaParams& base,
                                const PayloadSpec& payload) {
  const double m_total = base.m + payload.mass;
  const Vec3 com = payload.mass * payload.offset / m_total;

  auto parallel_axis = [](double m, const Vec3& r) -> Mat3 {
    return m * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
  };

  CompositeBody out;
  out.com_shift = com;
  out.inertia.m = m_total;
  out.inertia.J = base.J + parallel_axis(base.m, -com) + payload.shape_inertia +
                  parallel_axis(payload.mass, payload.offset - com);
  return out;
}

}  // namespace hexctl
