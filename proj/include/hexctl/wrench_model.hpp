#pragma once

#include <array>
#include <utility>

#include "hexctl/types.hpp"

namespace hexctl {

/// Blade parameters of the momentum-blade element thrust/torque model.
struct BladeCoefficients {
  double rho;  ///< air density [kg/m^3]
  double D;    ///< propeller diameter [m]
  double C_T;  ///< thrust coefficient
  double C_P;  ///< power coefficient
};

/// K1 = rho D^4 C_T, K2 = rho D^5 C_P / (2 pi).
struct BladeConstants {
  double k1;  ///< thrust per actuation unit [N]
  double k2;  ///< reaction torque per actuation unit [N m]
};

BladeConstants blade_constants(const BladeCoefficients& bc);

/// Placement of one propeller in the body frame.
struct PropellerGeometry {
  double theta;  ///< radial placement angle [rad]
  double phi;    ///< tilt away from the body z axis [rad]
  int w;         ///< spin sign, -1 or +1
  double d;      ///< arm length ||r_i|| [m]
};

struct DesignConfig {
  std::array<PropellerGeometry, 6> propellers;
  double k1 = 1.0;
  double k2 = 0.01;

  /// theta_i = (i-1) pi/3; phi, w given per propeller; common arm length d.
  static DesignConfig equally_spaced(const std::array<double, 6>& phi,
                                     const std::array<int, 6>& w, double d,
                                     double k1 = 1.0, double k2 = 0.01);
};

struct Wrench {
  Vec3 F = Vec3::Zero();  ///< body-frame force [N]
  Vec3 M = Vec3::Zero();  ///< body-frame torque [N m]
};

/// Normalized per-propeller actuation; feasible iff every |u_i| <= 1.
struct ActuationVector {
  Vec6 u = Vec6::Zero();

  bool feasible(double tol = 0.0) const { return u.cwiseAbs().maxCoeff() <= 1.0 + tol; }
};

/// 6x6 map from actuations to body wrench, with cached inverse row blocks.
class ActuationMatrix {
 public:
  explicit ActuationMatrix(const DesignConfig& cfg);

  const Mat6& A() const { return A_; }
  bool invertible() const { return invertible_; }
  double condition_number() const { return cond_; }
  int rank() const { return rank_; }

  /// Inverse; throws SingularDesign when rank < 6.
  const Mat6& A_inv() const;
  /// Force block (first three entries) of row i of the inverse.
  Vec3 b(int i) const;
  /// Torque block (last three entries) of row i of the inverse.
  Vec3 c(int i) const;

 private:
  Mat6 A_;
  Mat6 A_inv_;
  bool invertible_ = false;
  double cond_ = 0.0;
  int rank_ = 0;
};

/// Column of the actuation matrix for one propeller.
Vec6 actuation_column(const PropellerGeometry& p, double k1, double k2);

ActuationMatrix build_actuation_matrix(const DesignConfig& cfg);

Wrench forward_map(const ActuationMatrix& am, const ActuationVector& u);

struct AllocationResult {
  ActuationVector u;
  bool feasible;
};

/// u = A^-1 [F; M]; throws SingularDesign without inverse blocks.
AllocationResult allocate(const ActuationMatrix& am, const Wrench& w);

enum class SaturationPolicy { kClamp, kScale };

struct SaturationResult {
  ActuationVector u;
  bool saturated;
};

SaturationResult saturate(const ActuationVector& u, SaturationPolicy policy);

enum class WrenchKind { kForce, kTorque };

/// min_i 1/|b_i . e| (force) or 1/|c_i . e| (torque) along unit direction e.
/// Returns +infinity when every inner product vanishes.
double wrench_limit_along(const ActuationMatrix& am, WrenchKind kind, const Vec3& e);

struct WrenchLimits {
  double f_max;  ///< min_i 1/||b_i||
  double m_max;  ///< min_i 1/||c_i||
};

WrenchLimits wrench_limits(const ActuationMatrix& am);

}  // namespace hexctl
