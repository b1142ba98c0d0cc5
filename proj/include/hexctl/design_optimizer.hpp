#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hexctl/types.hpp"
#include "hexctl/wrench_model.hpp"

namespace hexctl {

struct OptimizerSettings {
  double phi_max = M_PI / 3.0;  ///< tilt bound [rad]
  double d = 0.16;              ///< arm length [m]
  double k_ratio = 0.01;        ///< K2/K1
  int n_starts = 1000;          ///< random initializations per spin orbit
  std::uint64_t seed = 0;
  double tol = 1e-8;            ///< local solver tolerance
  int max_evals = 5000;         ///< local solver evaluation cap per start
  std::vector<double> lambda_grid;  ///< empty = 0..1 in 0.05 steps
  int threads = 0;              ///< 0 = hardware concurrency
};

struct SpinPattern {
  std::array<int, 6> w;
  bool operator==(const SpinPattern&) const = default;
};

/// Canonical representative (lexicographically smallest cyclic rotation).
SpinPattern canonical_spin(const SpinPattern& s);

/// The 14 canonical spin patterns modulo cyclic rotation, sorted.
std::vector<SpinPattern> spin_orbits();

struct DesignPoint {
  std::array<double, 6> phi{};  ///< tilt angles [rad]
  SpinPattern w{};
  int orbit_index = -1;
  double p = 0.0;      ///< max_i ||b_i||^2
  double q = 0.0;      ///< max_i ||c_i||^2
  double f_max = 0.0;  ///< 1/sqrt(p)
  double m_max = 0.0;  ///< 1/sqrt(q)
};

enum class ShadowKind { kForce, kTorque };

struct ShadowResult {
  DesignPoint point;
  double cost;       ///< p* (force) or q* (torque)
  double companion;  ///< q at the force optimum / p at the torque optimum
};

/// Both epigraph shadow problems.
struct ShadowMinima {
  DesignPoint force_point;
  DesignPoint torque_point;
  double p_star;
  double q0;
  double p0;
  double q_star;
};

ShadowResult solve_shadow(ShadowKind kind, const OptimizerSettings& settings);
ShadowMinima solve_shadow_pair(const OptimizerSettings& settings);

struct NbiResult {
  DesignPoint point;
  double t;  ///< offset along the NBI normal
};

/// min t subject to the two constraint families anchored at the shadow
/// minima; best over the 14 orbits x n_starts initializations.
NbiResult nbi_subproblem(double lambda, const ShadowMinima& shadow,
                         const OptimizerSettings& settings);

struct ParetoPoint {
  double lambda;
  double t = 0.0;
  DesignPoint point;
  bool converged = false;
  bool dominated = false;
};

struct ParetoFront {
  ShadowMinima shadow;
  std::vector<ParetoPoint> points;  ///< sorted by lambda
};

ParetoFront pareto_front(const OptimizerSettings& settings);

/// Equally spaced DesignConfig for a solved point (K1-normalized by default).
DesignConfig to_design_config(const DesignPoint& point,
                              const OptimizerSettings& settings, double k1 = 1.0);

namespace detail {
/// b/c squared row norms of A^-1 for phi/w at given geometry; false when the
/// actuation matrix is (numerically) singular.
bool epigraph_costs(const std::array<double, 6>& phi, const SpinPattern& w,
                    double d, double k_ratio, std::array<double, 6>& b2,
                    std::array<double, 6>& c2);
}  // namespace detail

}  // namespace hexctl
