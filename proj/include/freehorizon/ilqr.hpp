#pragma once

#include <optional>
#include <vector>

#include "freehorizon/cost.hpp"
#include "freehorizon/dynamics.hpp"

namespace freehorizon {

/// Thrown when the backward pass stays indefinite at the regularization
/// ceiling or the line search cannot make progress at any regularization.
struct SolverDiverged : std::runtime_error {
  SolverDiverged(std::string msg, std::vector<Vec> traj, std::vector<Vec> ctrls)
      : std::runtime_error(std::move(msg)),
        last_trajectory(std::move(traj)),
        last_controls(std::move(ctrls)) {}
  std::vector<Vec> last_trajectory;
  std::vector<Vec> last_controls;
};

struct SolverOptions {
  int max_iterations = 200;
  double cost_tolerance = 1e-7;  // relative cost change
  double reg_init = 1.0;         // regularization re-entry level on failure
  double reg_min = 1e-8;
  double reg_max = 1e8;
  double reg_scale = 2.0;
  int line_search_steps = 11;  // alphas 1, 1/2, ..., 2^-10
  double armijo = 1e-4;
};

/// A fixed-horizon problem instance: dynamics, cost, initial state.
struct Problem {
  Model model;
  CostSpec cost;
  Vec x0;
};

struct SolveResult {
  std::vector<Vec> trajectory;  // T + 1 states
  std::vector<Vec> controls;    // T controls
  CostBreakdown breakdown;      // terminal = beta^T * phi(x_T), raw phi
  double terminal_phi = 0.0;    // undiscounted phi(x_T)
  bool converged = false;
  int iterations = 0;
  std::vector<Mat> feedback_gains;  // p x n per step
};

struct BackwardPassResult {
  std::vector<Vec> feedforward;     // k_ff per step
  std::vector<Mat> feedback;        // K per step
  double expected_decrease_1 = 0.0;  // sum k' Q_u
  double expected_decrease_2 = 0.0;  // 0.5 sum k' Q_uu k
};

/// Riccati-like value recursion over the given linearizations and cost
/// expansions. Q_uu is regularized by +reg*I before inversion. Returns
/// nullopt if some Q_uu + reg*I is not positive definite.
std::optional<BackwardPassResult> backward_pass(
    const std::vector<Model::Linearization>& lins,
    const std::vector<QuadExpansion>& stage_expansions,
    const QuadExpansion& terminal_expansion, double reg);

struct ForwardPassResult {
  std::vector<Vec> trajectory;
  std::vector<Vec> controls;
  CostBreakdown breakdown;
  double alpha = 0.0;
};

/// Line-searched rollout u = u_nom + alpha*k_ff + K (x - x_nom). Accepts the
/// first alpha whose actual decrease clears the Armijo fraction of the
/// predicted decrease. Returns nullopt when no alpha is accepted.
std::optional<ForwardPassResult> forward_pass(
    const Problem& problem, const std::vector<Vec>& nominal_traj,
    const std::vector<Vec>& nominal_controls, double nominal_cost,
    const BackwardPassResult& bp, const SolverOptions& options);

/// Solve FH-OCP with horizon T by iLQR. breakdown.terminal carries the raw
/// (non-maxed) discounted terminal cost; callers apply max(phi, M) themselves.
SolveResult solve_fhocp(const Problem& problem, int T,
                        const std::vector<Vec>& init_controls = {},
                        const SolverOptions& options = {});

}  // namespace freehorizon
