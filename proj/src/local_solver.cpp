#include "hexctl/local_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hexctl {

namespace {

struct Evaluator {
  const BoxedProblem& problem;
  const SolveOptions& options;
  VecX lambda;  // multiplier estimates, one per inequality
  double mu = 10.0;
  int evals = 0;

  // Augmented Lagrangian value at x; false on evaluation failure or cap.
  bool value(const VecX& x, double& out, VecX* g_out = nullptr) {
    if (evals >= options.max_evals) return false;
    ++evals;
    double f;
    if (!problem.objective(x, f) || !std::isfinite(f)) return false;
    VecX g(problem.n_ineq);
    if (problem.n_ineq > 0) {
      if (!problem.constraints(x, g) || !g.allFinite()) return false;
    }
    double penalty = 0.0;
    for (int i = 0; i < problem.n_ineq; ++i) {
      const double t = std::max(0.0, lambda(i) - mu * g(i));
      penalty += t * t - lambda(i) * lambda(i);
    }
    out = f + penalty / (2.0 * mu);
    if (g_out) *g_out = g;
    return true;
  }

  // Forward-difference gradient; steps flipped away from active bounds.
  bool gradient(const VecX& x, double v0, VecX& grad) {
    const int n = static_cast<int>(x.size());
    grad.resize(n);
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (int i = 0; i < n; ++i) {
      double h = root_eps * std::max(1.0, std::abs(x(i)));
      VecX xp = x;
      double sign = 1.0;
      if (x(i) + h > problem.upper(i)) {
        h = -h;
        sign = -1.0;
      }
      xp(i) = x(i) + h;
      if (xp(i) < problem.lower(i)) xp(i) = problem.lower(i);
      double vp;
      if (!value(xp, vp)) return false;
      grad(i) = sign * (vp - v0) / std::abs(h);
    }
    return true;
  }
};

VecX project(const BoxedProblem& p, const VecX& x) {
  return x.cwiseMax(p.lower).cwiseMin(p.upper);
}

}  // namespace

SolveResult local_solve(const BoxedProblem& problem, const VecX& x0,
                        const SolveOptions& options) {
  const int n = static_cast<int>(x0.size());
  Evaluator ev{problem, options};
  ev.lambda = VecX::Zero(problem.n_ineq);

  SolveResult result;
  result.x = project(problem, x0);

  VecX x = result.x;
  VecX g_last = VecX::Zero(problem.n_ineq);
  bool inner_converged = false;

  constexpr int kMaxOuter = 8;
  for (int outer = 0; outer < kMaxOuter; ++outer) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    double v;
    VecX g(problem.n_ineq);
    if (!ev.value(x, v, &g)) break;
    g_last = g;
    VecX grad(n);
    if (!ev.gradient(x, v, grad)) break;

    const double inner_tol =
        problem.n_ineq == 0 ? options.tol
                            : std::max(options.tol, 1e-5 * std::pow(0.1, outer));
    inner_converged = false;
    double last_pg = std::numeric_limits<double>::infinity();
    constexpr int kMaxInner = 80;
    for (int it = 0; it < kMaxInner; ++it) {
      VecX pg = x - project(problem, x - grad);
      last_pg = pg.lpNorm<Eigen::Infinity>();
      if (last_pg < inner_tol) {
        inner_converged = true;
        break;
      }
      VecX d = -(H * grad);
      if (d.dot(grad) >= 0.0) d = -grad;

      double alpha = 1.0;
      bool step_ok = false;
      VecX xn;
      double vn = 0.0;
      VecX gn(problem.n_ineq);
      for (int ls = 0; ls < 40; ++ls) {
        xn = project(problem, x + alpha * d);
        const double slope = grad.dot(xn - x);
        if (ev.value(xn, vn, &gn) && vn < v + 1e-4 * std::min(slope, 0.0)) {
          step_ok = true;
          break;
        }
        alpha *= 0.5;
        if (ev.evals >= options.max_evals) break;
      }
      if (!step_ok) break;

      VecX gradn(n);
      if (!ev.gradient(xn, vn, gradn)) {
        x = xn;
        g_last = gn;
        break;
      }
      const VecX s = xn - x;
      const VecX y = gradn - grad;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        const VecX Hy = H * y;
        H += (s * s.transpose()) * ((sy + y.dot(Hy)) / (sy * sy));
        H -= (Hy * s.transpose() + s * Hy.transpose()) / sy;
      }
      x = xn;
      v = vn;
      grad = gradn;
      g_last = gn;
      if (ev.evals >= options.max_evals) break;
    }
    // Line-search stalls at the finite-difference noise floor count as
    // convergence when the projected gradient is already nearly there.
    if (!inner_converged && last_pg < 100.0 * inner_tol) inner_converged = true;

    if (problem.n_ineq == 0) {
      if (inner_converged) {
        result.converged = true;
        break;
      }
      if (ev.evals >= options.max_evals) break;
      continue;
    }

    double viol = 0.0;
    for (int i = 0; i < problem.n_ineq; ++i) {
      viol = std::max(viol, -g_last(i));
      ev.lambda(i) = std::max(0.0, ev.lambda(i) - ev.mu * g_last(i));
    }
    if (viol < std::max(1e-11, 1e-3 * options.tol) && outer >= 3) {
      result.converged = true;
      break;
    }
    if (ev.evals >= options.max_evals) break;
    ev.mu = std::min(ev.mu * 8.0, 1e9);
  }

  result.x = project(problem, x);
  double f_final;
  if (problem.objective(result.x, f_final) && std::isfinite(f_final)) {
    result.objective = f_final;
  } else {
    result.converged = false;
    result.objective = std::numeric_limits<double>::quiet_NaN();
  }
  VecX g_final(problem.n_ineq);
  if (problem.n_ineq > 0) {
    if (problem.constraints(result.x, g_final) && g_final.allFinite()) {
      result.max_violation = std::max(0.0, -g_final.minCoeff());
    } else {
      result.converged = false;
      result.max_violation = std::numeric_limits<double>::infinity();
    }
  }
  result.evals = ev.evals;
  return result;
}

}  // namespace hexctl
