#pragma once

#include <functional>

#include "hexctl/types.hpp"

namespace hexctl {

/// Inequality-constrained problem on a box:
///   minimize f(x)  subject to  g_i(x) >= 0,  lower <= x <= upper.
/// Evaluators return false when the point cannot be evaluated (e.g. a
/// singular actuation matrix); such points are treated as infeasible.
struct BoxedProblem {
  std::function<bool(const VecX&, double&)> objective;
  std::function<bool(const VecX&, VecX&)> constraints;
  int n_ineq = 0;
  VecX lower;  ///< entries may be -inf
  VecX upper;  ///< entries may be +inf
};

struct SolveOptions {
  double tol = 1e-8;     ///< convergence tolerance on the projected gradient
  int max_evals = 5000;  ///< cap on combined objective/constraint evaluations
};

struct SolveResult {
  VecX x;
  double objective = 0.0;
  double max_violation = 0.0;  ///< max_i max(0, -g_i(x))
  int evals = 0;
  bool converged = false;  ///< false = NoConvergence; caller discards the start
};

/// Derivative-free augmented Lagrangian solver (finite-difference gradients,
/// projected BFGS inner iterations).
SolveResult local_solve(const BoxedProblem& problem, const VecX& x0,
                        const SolveOptions& options = {});

}  // namespace hexctl
