#pragma once

#include <map>
#include <optional>
#include <vector>

#include "freehorizon/ilqr.hpp"

namespace freehorizon {

struct SweepFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when no swept horizon reaches the terminal set; the caller should
/// enlarge t_max (a finite hitting horizon always exists in the
/// undiscounted case).
struct HittingTimeNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepParams {
  int t_min = 10;
  int t_max = 1000;
  int t_step = 5;
  bool refine = true;    // unit-step refinement around the first coarse hit
  bool parallel = false; // cold-start sweep members concurrently
};

struct SweepRecord {
  int T = 0;
  double total_cost = 0.0;     // transfer + discounted raw phi
  double transfer_cost = 0.0;
  double terminal_phi = 0.0;   // undiscounted phi(x_T)
  bool hit = false;            // phi(x_T) <= M
  bool converged = false;
  int iterations = 0;
};

struct SweepOutcome {
  std::vector<SweepRecord> records;        // increasing T
  std::map<int, SolveResult> solutions;    // keyed by T
};

struct ACResult {
  int T_star = 0;
  double J_M = 0.0;  // transfer cost at T_star + M
  SolveResult solution;
  std::vector<SweepRecord> sweep;
};

struct DiscountedResult {
  bool entered = false;
  std::optional<int> T_star;
  std::optional<double> J_M;  // transfer + beta^T_star * M
  int budget_T = 0;
  double beta = 1.0;
  std::vector<SweepRecord> sweep;
};

/// Solve FH-OCP over the given horizons. Serial mode warm-starts each T from
/// the nearest smaller solved horizon, zero-extended; parallel mode cold
/// starts and is capped by FREEHORIZON_THREADS.
SweepOutcome sweep_horizons(const Problem& problem, double M,
                            const std::vector<int>& horizons,
                            const SolverOptions& options, bool warm_start,
                            bool parallel,
                            const std::vector<Vec>& seed_controls = {});

std::vector<SweepRecord> sweep_horizons(const Problem& problem, double M,
                                        int t_min, int t_max, int t_step,
                                        const SolverOptions& options,
                                        bool warm_start = true,
                                        bool parallel = false);

/// Smallest swept T with hit and converged both true.
std::optional<int> first_hitting_time(const std::vector<SweepRecord>& sweep);

/// AC-OCP by horizon sweeping: T* is the first hitting time of the terminal
/// set, J_M = transfer cost at T* + M.
ACResult solve_acocp(const Problem& problem, double M, const SweepParams& params,
                     const SolverOptions& options,
                     const std::vector<Vec>& seed_controls = {});

struct MSweepEntry {
  double M = 0.0;
  int T_star = 0;
  double J_M = 0.0;
  double J_ref = 0.0;
  double gap = 0.0;  // |J_M - J_ref|
};

/// Convergence study: solve AC-OCP for each M (descending) and
/// compare against a long-horizon terminal-cost-free reference solve.
std::vector<MSweepEntry> m_sweep(const Problem& problem,
                                 const std::vector<double>& m_values,
                                 const SweepParams& params,
                                 const SolverOptions& options, int t_ref = 1000);

/// Reference cost: FH-OCP with horizon t_ref and zero terminal weight.
double reference_cost(const Problem& problem, int t_ref,
                      const SolverOptions& options);

/// Discounted AC-OCP. entered=false (no swept horizon within the budget
/// reaches the terminal set) is a legitimate outcome for small beta.
DiscountedResult solve_discounted_acocp(const Problem& problem, double M,
                                        int budget_T, const SweepParams& params,
                                        const SolverOptions& options);

}  // namespace freehorizon
