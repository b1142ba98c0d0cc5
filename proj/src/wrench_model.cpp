#include "hexctl/wrench_model.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>

namespace hexctl {

namespace {
constexpr double kCondThreshold = 1e12;
}

BladeConstants blade_constants(const BladeCoefficients& bc) {
  const double d4 = bc.D * bc.D * bc.D * bc.D;
  return {bc.rho * d4 * bc.C_T,
          bc.rho * d4 * bc.D * bc.C_P / (2.0 * std::numbers::pi)};
}

DesignConfig DesignConfig::equally_spaced(const std::array<double, 6>& phi,
                                          const std::array<int, 6>& w, double d,
                                          double k1, double k2) {
  DesignConfig cfg;
  cfg.k1 = k1;
  cfg.k2 = k2;
  for (int i = 0; i < 6; ++i) {
    cfg.propellers[i] = {i * std::numbers::pi / 3.0, phi[i], w[i], d};
  }
  return cfg;
}

Vec6 actuation_column(const PropellerGeometry& p, double k1, double k2) {
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sp = std::sin(p.phi), cp = std::cos(p.phi);
  const double lever = k1 * p.d * cp - p.w * k2 * sp;
  Vec6 a;
  a << k1 * st * sp,
      -k1 * ct * sp,
      k1 * cp,
      lever * st,
      -lever * ct,
      -k1 * p.d * sp - p.w * k2 * cp;
  return a;
}

ActuationMatrix::ActuationMatrix(const DesignConfig& cfg) {
  for (int i = 0; i < 6; ++i) {
    A_.col(i) = actuation_column(cfg.propellers[i], cfg.k1, cfg.k2);
  }
  Eigen::JacobiSVD<Mat6> svd(A_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  for (int i = 0; i < 6; ++i) {
    if (sv(i) > 0.0 && smax / sv(i) < kCondThreshold) ++rank_;
  }
  cond_ = sv(5) > 0.0 ? smax / sv(5) : std::numeric_limits<double>::infinity();
  if (rank_ == 6) {
    invertible_ = true;
    A_inv_ = svd.solve(Mat6::Identity());
  } else {
    A_inv_.setZero();
  }
}

const Mat6& ActuationMatrix::A_inv() const {
  if (!invertible_) throw SingularDesign("actuation matrix rank < 6");
  return A_inv_;
}

Vec3 ActuationMatrix::b(int i) const { return A_inv().row(i).head<3>(); }

Vec3 ActuationMatrix::c(int i) const { return A_inv().row(i).tail<3>(); }

ActuationMatrix build_actuation_matrix(const DesignConfig& cfg) {
  return ActuationMatrix(cfg);
}

Wrench forward_map(const ActuationMatrix& am, const ActuationVector& u) {
  const Vec6 w = am.A() * u.u;
  return {w.head<3>(), w.tail<3>()};
}

AllocationResult allocate(const ActuationMatrix& am, const Wrench& w) {
  Vec6 fm;
  fm << w.F, w.M;
  ActuationVector u{am.A_inv() * fm};
  return {u, u.feasible()};
}

SaturationResult saturate(const ActuationVector& u, SaturationPolicy policy) {
  const double peak = u.u.cwiseAbs().maxCoeff();
  if (peak <= 1.0) return {u, false};
  ActuationVector out;
  if (policy == SaturationPolicy::kClamp) {
    out.u = u.u.cwiseMax(-1.0).cwiseMin(1.0);
  } else {
    out.u = u.u / peak;
  }
  return {out, true};
}

double wrench_limit_along(const ActuationMatrix& am, WrenchKind kind, const Vec3& e) {
  if (std::abs(e.norm() - 1.0) > 1e-6) throw NotUnit("direction must be unit length");
  double limit = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    const Vec3 row = kind == WrenchKind::kForce ? am.b(i) : am.c(i);
    const double dot = std::abs(row.dot(e));
    if (dot > 0.0) limit = std::min(limit, 1.0 / dot);
  }
  return limit;
}

WrenchLimits wrench_limits(const ActuationMatrix& am) {
  double f = std::numeric_limits<double>::infinity();
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    f = std::min(f, 1.0 / am.b(i).norm());
    m = std::min(m, 1.0 / am.c(i).norm());
  }
  return {f, m};
}

}  // namespace hexctl
