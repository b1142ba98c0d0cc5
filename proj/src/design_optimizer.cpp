#include "hexctl/design_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "hexctl/local_solver.hpp"

namespace hexctl {

namespace detail {

bool epigraph_costs(const std::array<double, 6>& phi, const SpinPattern& w,
                    double d, double k_ratio, std::array<double, 6>& b2,
                    std::array<double, 6>& c2) {
  Mat6 A;
  for (int i = 0; i < 6; ++i) {
    PropellerGeometry p{i * M_PI / 3.0, phi[i], w.w[i], d};
    A.col(i) = actuation_column(p, 1.0, k_ratio);
  }
  Eigen::PartialPivLU<Mat6> lu(A);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-13) return false;
  const Mat6 inv = lu.inverse();
  if (!inv.allFinite()) return false;
  for (int i = 0; i < 6; ++i) {
    b2[i] = inv.row(i).head<3>().squaredNorm();
    c2[i] = inv.row(i).tail<3>().squaredNorm();
  }
  return true;
}

}  // namespace detail

namespace {

using detail::epigraph_costs;

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

// Substream keyed on (seed, orbit, start) so evaluation order cannot matter.
std::uint64_t substream_key(std::uint64_t seed, int orbit, int start) {
  std::uint64_t s = seed;
  std::uint64_t mix = s ^ (0x100000001b3ULL * (static_cast<std::uint64_t>(orbit) + 1) +
                           0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(start) + 1));
  splitmix64(mix);
  return mix;
}

struct StartRecord {
  bool valid = false;
  double primary = std::numeric_limits<double>::infinity();
  double companion = std::numeric_limits<double>::infinity();
  double p = 0.0;
  double q = 0.0;
  std::array<double, 6> phi{};
};

// Per-start subproblem description shared by the shadow and NBI solves.
struct EpigraphSpec {
  // primary cost at phi; also fills p = max b2 and q = max c2
  std::function<bool(const std::array<double, 6>&, double& primary, double& p,
                     double& q)>
      cost;
  // epigraph constraints g(x) >= 0 for x = (aug, phi)
  std::function<bool(const VecX&, VecX&)> constraints;
  int n_ineq = 0;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs orbits x starts local solves, records results in deterministic slots.
std::vector<StartRecord> run_multistart(
    const std::vector<SpinPattern>& orbits, const OptimizerSettings& settings,
    const std::function<EpigraphSpec(const SpinPattern&)>& make_spec) {
  const int n_orbits = static_cast<int>(orbits.size());
  const int total = n_orbits * settings.n_starts;
  std::vector<StartRecord> records(total);

  auto run_one = [&](int idx) {
    const int orbit = idx / settings.n_starts;
    const int start = idx % settings.n_starts;
    StartRecord& rec = records[idx];

    std::uint64_t rng = substream_key(settings.seed, orbit, start);
    std::array<double, 6> phi0;
    for (double& v : phi0) {
      v = (2.0 * uniform01(rng) - 1.0) * settings.phi_max;
    }

    const EpigraphSpec spec = make_spec(orbits[orbit]);
    double aug0, p0, q0;
    if (!spec.cost(phi0, aug0, p0, q0)) return;

    BoxedProblem problem;
    problem.n_ineq = spec.n_ineq;
    problem.objective = [](const VecX& x, double& out) {
      out = x(0);
      return true;
    };
    problem.constraints = spec.constraints;
    problem.lower = VecX::Constant(7, -settings.phi_max);
    problem.upper = VecX::Constant(7, settings.phi_max);
    problem.lower(0) = -std::numeric_limits<double>::infinity();
    problem.upper(0) = std::numeric_limits<double>::infinity();

    VecX x0(7);
    x0(0) = aug0;
    for (int i = 0; i < 6; ++i) x0(i + 1) = phi0[i];

    SolveOptions opts;
    opts.tol = settings.tol;
    opts.max_evals = settings.max_evals;
    const SolveResult res = local_solve(problem, x0, opts);
    if (!res.converged) return;

    std::array<double, 6> phi;
    for (int i = 0; i < 6; ++i) {
      phi[i] = std::clamp(res.x(i + 1), -settings.phi_max, settings.phi_max);
    }
    double primary, p, q;
    if (!spec.cost(phi, primary, p, q)) return;
    rec.valid = true;
    rec.primary = primary;
    rec.p = p;
    rec.q = q;
    rec.phi = phi;
  };

  const int n_threads = std::min(resolve_threads(settings.threads), total);
  if (n_threads <= 1) {
    for (int i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int idx; (idx = next.fetch_add(1)) < total;) run_one(idx);
      });
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

// Ties on the primary cost are broken by (orbit, companion, start): the
// lexicographic necklace order pins which of the degenerate optima is
// reported, and the companion refinement pins the family inside an orbit.
int select_shadow_winner(const std::vector<StartRecord>& records, int n_starts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (r.valid) best = std::min(best, r.primary);
  }
  if (!std::isfinite(best)) return -1;
  const double window = std::max(1e-9, 1e-7 * std::abs(best));
  int winner = -1;
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    const auto& r = records[i];
    if (!r.valid || r.primary > best + window) continue;
    if (winner < 0) {
      winner = i;
      continue;
    }
    const auto& w = records[winner];
    const int orbit_i = i / n_starts, orbit_w = winner / n_starts;
    if (orbit_i != orbit_w) {
      if (orbit_i < orbit_w) winner = i;
    } else if (r.companion < w.companion - 1e-12) {
      winner = i;
    }
  }
  return winner;
}

// NBI ties prefer the non-dominated sample: the normalized p+q sum orders any
// dominated pair correctly and is a total order, so the parallel reduction
// stays deterministic.
int select_nbi_winner(const std::vector<StartRecord>& records, int n_starts,
                      double p_scale, double q_scale) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (r.valid) best = std::min(best, r.primary);
  }
  if (!std::isfinite(best)) return -1;
  const double window = std::max(1e-8, 1e-7 * std::abs(best));
  int winner = -1;
  double winner_sum = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(records.size()); ++i) {
    const auto& r = records[i];
    if (!r.valid || r.primary > best + window) continue;
    const double sum = r.p / p_scale + r.q / q_scale;
    if (winner < 0 || sum < winner_sum - 1e-12) {
      winner = i;
      winner_sum = sum;
    }
  }
  return winner;
}

DesignPoint make_point(const StartRecord& rec, int orbit_index,
                       const std::vector<SpinPattern>& orbits) {
  DesignPoint pt;
  pt.phi = rec.phi;
  pt.w = orbits[orbit_index];
  pt.orbit_index = orbit_index;
  pt.p = rec.p;
  pt.q = rec.q;
  pt.f_max = 1.0 / std::sqrt(rec.p);
  pt.m_max = 1.0 / std::sqrt(rec.q);
  return pt;
}

}  // namespace

SpinPattern canonical_spin(const SpinPattern& s) {
  SpinPattern best = s;
  for (int shift = 1; shift < 6; ++shift) {
    SpinPattern rot;
    for (int i = 0; i < 6; ++i) rot.w[i] = s.w[(i + shift) % 6];
    if (std::lexicographical_compare(rot.w.begin(), rot.w.end(),
                                     best.w.begin(), best.w.end())) {
      best = rot;
    }
  }
  return best;
}

std::vector<SpinPattern> spin_orbits() {
  std::set<std::array<int, 6>> seen;
  for (int mask = 0; mask < 64; ++mask) {
    SpinPattern s;
    for (int i = 0; i < 6; ++i) s.w[i] = (mask >> i) & 1 ? 1 : -1;
    seen.insert(canonical_spin(s).w);
  }
  std::vector<SpinPattern> orbits;
  orbits.reserve(seen.size());
  for (const auto& w : seen) orbits.push_back({w});
  return orbits;
}

ShadowResult solve_shadow(ShadowKind kind, const OptimizerSettings& settings) {
  const auto orbits = spin_orbits();
  const bool force = kind == ShadowKind::kForce;

  auto make_spec = [&](const SpinPattern& w) {
    EpigraphSpec spec;
    spec.n_ineq = 6;
    spec.cost = [&settings, w, force](const std::array<double, 6>& phi,
                                      double& primary, double& p, double& q) {
      std::array<double, 6> b2, c2;
      if (!epigraph_costs(phi, w, settings.d, settings.k_ratio, b2, c2)) {
        return false;
      }
      p = *std::max_element(b2.begin(), b2.end());
      q = *std::max_element(c2.begin(), c2.end());
      primary = force ? p : q;
      return true;
    };
    spec.constraints = [&settings, w, force](const VecX& x, VecX& g) {
      std::array<double, 6> phi;
      for (int i = 0; i < 6; ++i) phi[i] = x(i + 1);
      std::array<double, 6> b2, c2;
      if (!epigraph_costs(phi, w, settings.d, settings.k_ratio, b2, c2)) {
        return false;
      }
      const auto& active = force ? b2 : c2;
      const double scale = force ? 1.0 : 10.0;
      for (int i = 0; i < 6; ++i) g(i) = (x(0) - active[i]) / scale;
      return true;
    };
    return spec;
  };

  const auto records = run_multistart(orbits, settings, make_spec);
  const int winner = select_shadow_winner(records, settings.n_starts);
  if (winner < 0) {
    throw AllStartsFailed(force ? "force shadow: no start converged"
                        : "torque shadow: no start converged");
  }
  const auto& rec = records[winner];
  ShadowResult result;
  result.point = make_point(rec, winner / settings.n_starts, orbits);
  result.cost = rec.primary;
  result.companion = force ? rec.q : rec.p;
  return result;
}

ShadowMinima solve_shadow_pair(const OptimizerSettings& settings) {
  const ShadowResult f = solve_shadow(ShadowKind::kForce, settings);
  const ShadowResult t = solve_shadow(ShadowKind::kTorque, settings);
  return {f.point, t.point, f.cost, f.companion, t.companion, t.cost};
}

NbiResult nbi_subproblem(double lambda, const ShadowMinima& shadow,
                         const OptimizerSettings& settings) {
  if (lambda < 0.0 || lambda > 1.0) throw Error("lambda must lie in [0, 1]");
  const double slope_b = shadow.q0 - shadow.q_star;
  const double slope_c = shadow.p0 - shadow.p_star;
  if (slope_b <= 1e-12 || slope_c <= 1e-12) {
    throw Error("degenerate NBI anchors: shadow minima coincide");
  }
  const double off_b = (1.0 - lambda) * shadow.p_star + lambda * shadow.p0;
  const double off_c = lambda * shadow.q_star + (1.0 - lambda) * shadow.q0;

  const auto orbits = spin_orbits();
  auto make_spec = [&](const SpinPattern& w) {
    EpigraphSpec spec;
    spec.n_ineq = 12;
    spec.cost = [&settings, w, slope_b, slope_c, off_b, off_c](
                    const std::array<double, 6>& phi, double& primary,
                    double& p, double& q) {
      std::array<double, 6> b2, c2;
      if (!epigraph_costs(phi, w, settings.d, settings.k_ratio, b2, c2)) {
        return false;
      }
      p = *std::max_element(b2.begin(), b2.end());
      q = *std::max_element(c2.begin(), c2.end());
      primary = std::max((p - off_b) / slope_b, (q - off_c) / slope_c);
      return true;
    };
    spec.constraints = [&settings, w, slope_b, slope_c, off_b, off_c](
                           const VecX& x, VecX& g) {
      std::array<double, 6> phi;
      for (int i = 0; i < 6; ++i) phi[i] = x(i + 1);
      std::array<double, 6> b2, c2;
      if (!epigraph_costs(phi, w, settings.d, settings.k_ratio, b2, c2)) {
        return false;
      }
      for (int i = 0; i < 6; ++i) {
        g(i) = x(0) + (off_b - b2[i]) / slope_b;
        g(i + 6) = x(0) + (off_c - c2[i]) / slope_c;
      }
      return true;
    };
    return spec;
  };

  const auto records = run_multistart(orbits, settings, make_spec);
  const int winner = select_nbi_winner(records, settings.n_starts,
                                       shadow.p_star, shadow.q_star);
  if (winner < 0) throw AllStartsFailed("NBI subproblem: no start converged");
  const auto& rec = records[winner];
  return {make_point(rec, winner / settings.n_starts, orbits), rec.primary};
}

ParetoFront pareto_front(const OptimizerSettings& settings) {
  std::vector<double> grid = settings.lambda_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
  }
  std::sort(grid.begin(), grid.end());

  ParetoFront front;
  front.shadow = solve_shadow_pair(settings);
  for (const double lambda : grid) {
    ParetoPoint pp;
    pp.lambda = lambda;
    try {
      const NbiResult r = nbi_subproblem(lambda, front.shadow, settings);
      pp.point = r.point;
      pp.t = r.t;
      pp.converged = true;
    } catch (const AllStartsFailed&) {
      pp.converged = false;
    }
    front.points.push_back(pp);
  }

  for (auto& a : front.points) {
    if (!a.converged) continue;
    for (const auto& b : front.points) {
      if (&a == &b || !b.converged) continue;
      const bool leq = b.point.p <= a.point.p + 1e-6 && b.point.q <= a.point.q + 1e-6;
      const bool strict = b.point.p < a.point.p - 1e-6 || b.point.q < a.point.q - 1e-6;
      if (leq && strict) {
        a.dominated = true;
        break;
      }
    }
  }
  return front;
}

DesignConfig to_design_config(const DesignPoint& point,
                              const OptimizerSettings& settings, double k1) {
  return DesignConfig::equally_spaced(point.phi, point.w.w, settings.d, k1,
                                      k1 * settings.k_ratio);
}

}  // namespace hexctl
