#include "freehorizon/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>
#include <thread>

namespace freehorizon {

namespace {

SweepRecord make_record(int T, const SolveResult& sol, double M) {
  SweepRecord r;
  r.T = T;
  r.total_cost = sol.breakdown.total;
  r.transfer_cost = sol.breakdown.transfer;
  r.terminal_phi = sol.terminal_phi;
  r.hit = sol.terminal_phi <= M;
  r.converged = sol.converged;
  r.iterations = sol.iterations;
  return r;
}

std::vector<Vec> fit_length(const std::vector<Vec>& controls, int T, int p) {
  std::vector<Vec> out(controls.begin(),
                       controls.begin() + std::min<size_t>(controls.size(), T));
  while (static_cast<int>(out.size()) < T) out.push_back(Vec::Zero(p));
  return out;
}

int thread_cap() {
  if (const char* env = std::getenv("FREEHORIZON_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 4;
}

}  // namespace

SweepOutcome sweep_horizons(const Problem& problem, double M,
                            const std::vector<int>& horizons,
                            const SolverOptions& options, bool warm_start,
                            bool parallel,
                            const std::vector<Vec>& seed_controls) {
  SweepOutcome out;
  const int p = problem.model.control_dim();
  std::vector<std::string> failures;

  if (parallel && !warm_start) {
    const int cap = thread_cap();
    std::vector<std::optional<SolveResult>> results(horizons.size());
    for (size_t base = 0; base < horizons.size(); base += cap) {
      const size_t end = std::min(horizons.size(), base + cap);
      std::vector<std::future<SolveResult>> futs;
      for (size_t i = base; i < end; ++i) {
        futs.push_back(std::async(std::launch::async, [&, i] {
          return solve_fhocp(problem, horizons[i],
                             seed_controls.empty()
                                 ? std::vector<Vec>{}
                                 : fit_length(seed_controls, horizons[i], p),
                             options);
        }));
      }
      for (size_t i = base; i < end; ++i) {
        try {
          results[i] = futs[i - base].get();
        } catch (const SolverDiverged& e) {
          failures.push_back("T=" + std::to_string(horizons[i]) + ": " + e.what());
        }
      }
    }
    for (size_t i = 0; i < horizons.size(); ++i) {
      if (!results[i]) continue;
      out.records.push_back(make_record(horizons[i], *results[i], M));
      out.solutions.emplace(horizons[i], std::move(*results[i]));
    }
  } else {
    std::vector<Vec> warm = seed_controls;
    for (int T : horizons) {
      std::vector<Vec> init;
      if (!warm.empty() && warm_start) init = fit_length(warm, T, p);
      else if (!seed_controls.empty()) init = fit_length(seed_controls, T, p);
      std::optional<SolveResult> best;
      std::string error;
      // A seeded solve is fast but inherits the seed's local basin, which can
      // be far from optimal on nonconvex models; always race it against a
      // cold zero-control solve and keep the cheaper trajectory.
      try {
        best = solve_fhocp(problem, T, init, options);
      } catch (const SolverDiverged& e) {
        error = e.what();
      }
      if (!init.empty()) {
        try {
          SolveResult cold = solve_fhocp(problem, T, {}, options);
          if (!best || cold.breakdown.total < best->breakdown.total)
            best = std::move(cold);
        } catch (const SolverDiverged& e) {
          if (!best) error = e.what();
        }
      }
      if (best) {
        if (warm_start) warm = best->controls;
        out.records.push_back(make_record(T, *best, M));
        out.solutions.emplace(T, std::move(*best));
      } else {
        failures.push_back("T=" + std::to_string(T) + ": " + error);
      }
    }
  }

  if (out.records.empty()) {
    std::ostringstream msg;
    msg << "sweep failed: no horizon solved;";
    for (const auto& f : failures) msg << " [" << f << "]";
    throw SweepFailed(msg.str());
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const SweepRecord& a, const SweepRecord& b) { return a.T < b.T; });
  return out;
}

std::vector<SweepRecord> sweep_horizons(const Problem& problem, double M,
                                        int t_min, int t_max, int t_step,
                                        const SolverOptions& options,
                                        bool warm_start, bool parallel) {
  if (t_min < 1 || t_min > t_max || t_step < 1)
    throw ContractViolation("sweep_horizons: need 1 <= t_min <= t_max, t_step >= 1");
  std::vector<int> horizons;
  for (int T = t_min; T <= t_max; T += t_step) horizons.push_back(T);
  return sweep_horizons(problem, M, horizons, options, warm_start, parallel)
      .records;
}

std::optional<int> first_hitting_time(const std::vector<SweepRecord>& sweep) {
  for (const auto& r : sweep)
    if (r.hit && r.converged) return r.T;
  return std::nullopt;
}

ACResult solve_acocp(const Problem& problem, double M, const SweepParams& params,
                     const SolverOptions& options,
                     const std::vector<Vec>& seed_controls) {
  if (M <= 0.0) throw ContractViolation("solve_acocp: M must be > 0");
  if (params.t_min < 1 || params.t_min > params.t_max || params.t_step < 1)
    throw ContractViolation("solve_acocp: bad sweep bounds");
  problem.cost.validate(problem.model.state_dim(), problem.model.control_dim());

  std::vector<int> horizons;
  for (int T = params.t_min; T <= params.t_max; T += params.t_step)
    horizons.push_back(T);

  SweepOutcome coarse = sweep_horizons(problem, M, horizons, options,
                                       !params.parallel, params.parallel,
                                       seed_controls);
  auto coarse_hit = first_hitting_time(coarse.records);
  if (!coarse_hit)
    throw HittingTimeNotFound(
        "solve_acocp: no hitting horizon up to t_max=" +
        std::to_string(params.t_max) + "; increase the horizon budget");

  int t_star = *coarse_hit;
  if (params.refine && params.t_step > 1) {
    // Unit-step scan of the gap below the coarse hit, warm-started from the
    // nearest smaller solved horizon.
    const int lo = std::max(params.t_min, t_star - params.t_step + 1);
    if (lo < t_star) {
      // Seed every refinement horizon from the coarse hit solution,
      // truncated. Chaining unit steps upward from the solution below the
      // gap can wander into a different local basin that touches the
      // terminal set with a much worse transfer cost.
      const std::vector<Vec> seed = coarse.solutions.at(t_star).controls;
      std::vector<int> fine;
      for (int T = lo; T < t_star; ++T) fine.push_back(T);
      SweepOutcome refined =
          sweep_horizons(problem, M, fine, options, false, false, seed);
      for (auto& r : refined.records) coarse.records.push_back(r);
      for (auto& [T, sol] : refined.solutions)
        coarse.solutions.emplace(T, std::move(sol));
      std::sort(coarse.records.begin(), coarse.records.end(),
                [](const SweepRecord& a, const SweepRecord& b) {
                  return a.T < b.T;
                });
      t_star = *first_hitting_time(coarse.records);
    }
  }

  ACResult result;
  result.T_star = t_star;
  result.solution = coarse.solutions.at(t_star);
  result.J_M = result.solution.breakdown.transfer + M;
  result.sweep = std::move(coarse.records);
  return result;
}

double reference_cost(const Problem& problem, int t_ref,
                      const SolverOptions& options) {
  // Terminal-cost-free long-horizon solve used as the IH-OCP proxy.
  Problem ref = problem;
  ref.cost.Q_T = Mat::Zero(problem.model.state_dim(), problem.model.state_dim());
  return solve_fhocp(ref, t_ref, {}, options).breakdown.total;
}

std::vector<MSweepEntry> m_sweep(const Problem& problem,
                                 const std::vector<double>& m_values,
                                 const SweepParams& params,
                                 const SolverOptions& options, int t_ref) {
  if (m_values.empty()) throw ContractViolation("m_sweep: empty M list");
  for (size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] <= 0.0) throw ContractViolation("m_sweep: M must be > 0");
    if (i > 0 && m_values[i] >= m_values[i - 1])
      throw ContractViolation("m_sweep: M list must be strictly decreasing");
  }
  const double j_ref = reference_cost(problem, t_ref, options);

  std::vector<MSweepEntry> out;
  for (double M : m_values) {
    // Each level is solved cold: re-seeding from the previous level's
    // controls truncates a long maneuver into the short sweep horizons and
    // can steer the whole warm-start chain into a poor local minimum.
    ACResult ac = solve_acocp(problem, M, params, options);
    MSweepEntry e;
    e.M = M;
    e.T_star = ac.T_star;
    e.J_M = ac.J_M;
    e.J_ref = j_ref;
    e.gap = std::abs(ac.J_M - j_ref);
    out.push_back(e);
  }
  return out;
}

DiscountedResult solve_discounted_acocp(const Problem& problem, double M,
                                        int budget_T, const SweepParams& params,
                                        const SolverOptions& options) {
  if (!(problem.cost.beta > 0.0 && problem.cost.beta < 1.0))
    throw ContractViolation("solve_discounted_acocp: beta must lie in (0,1)");
  if (M <= 0.0) throw ContractViolation("solve_discounted_acocp: M must be > 0");

  DiscountedResult result;
  result.budget_T = budget_T;
  result.beta = problem.cost.beta;

  SweepParams capped = params;
  capped.t_max = std::min(params.t_max, budget_T);
  try {
    ACResult ac = solve_acocp(problem, M, capped, options);
    result.entered = true;
    result.T_star = ac.T_star;
    result.J_M = ac.solution.breakdown.transfer +
                 std::pow(problem.cost.beta, ac.T_star) * M;
    result.sweep = std::move(ac.sweep);
  } catch (const HittingTimeNotFound&) {
    result.entered = false;
    result.sweep = sweep_horizons(problem, M, capped.t_min, capped.t_max,
                                  capped.t_step, options);
  }
  return result;
}

}  // namespace freehorizon
