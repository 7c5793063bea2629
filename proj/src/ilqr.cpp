#include "freehorizon/ilqr.hpp"

#include <cmath>

namespace freehorizon {

std::optional<BackwardPassResult> backward_pass(
    const std::vector<Model::Linearization>& lins,
    const std::vector<QuadExpansion>& stage_expansions,
    const QuadExpansion& terminal_expansion, double reg) {
  const int T = static_cast<int>(lins.size());
  if (T < 1 || stage_expansions.size() != lins.size())
    throw ContractViolation("backward_pass: need T >= 1 matching expansions");

  Vec V_x = terminal_expansion.c_x;
  Mat V_xx = terminal_expansion.c_xx;

  BackwardPassResult out;
  out.feedforward.resize(T);
  out.feedback.resize(T);

  for (int k = T - 1; k >= 0; --k) {
    const Mat& A = lins[k].A;
    const Mat& B = lins[k].B;
    const QuadExpansion& e = stage_expansions[k];

    const Vec Q_x = e.c_x + A.transpose() * V_x;
    const Vec Q_u = e.c_u + B.transpose() * V_x;
    const Mat Q_xx = e.c_xx + A.transpose() * V_xx * A;
    const Mat Q_ux = e.c_ux + B.transpose() * V_xx * A;
    Mat Q_uu = e.c_uu + B.transpose() * V_xx * B;
    Q_uu = 0.5 * (Q_uu + Q_uu.transpose()).eval();

    Mat Q_uu_reg = Q_uu;
    Q_uu_reg.diagonal().array() += reg;
    Eigen::LLT<Mat> llt(Q_uu_reg);
    if (llt.info() != Eigen::Success) return std::nullopt;

    const Vec k_ff = -llt.solve(Q_u);
    const Mat K = -llt.solve(Q_ux);

    out.expected_decrease_1 += k_ff.dot(Q_u);
    out.expected_decrease_2 += 0.5 * k_ff.dot(Q_uu * k_ff);

    V_x = Q_x + K.transpose() * Q_uu * k_ff + K.transpose() * Q_u +
          Q_ux.transpose() * k_ff;
    V_xx = Q_xx + K.transpose() * Q_uu * K + K.transpose() * Q_ux +
           Q_ux.transpose() * K;
    V_xx = 0.5 * (V_xx + V_xx.transpose()).eval();

    out.feedforward[k] = k_ff;
    out.feedback[k] = K;
  }
  return out;
}

std::optional<ForwardPassResult> forward_pass(
    const Problem& problem, const std::vector<Vec>& nominal_traj,
    const std::vector<Vec>& nominal_controls, double nominal_cost,
    const BackwardPassResult& bp, const SolverOptions& options) {
  const size_t T = nominal_controls.size();
  const double zero_band = 1e-12 * (1.0 + std::abs(nominal_cost));

  double alpha = 1.0;
  for (int i = 0; i < options.line_search_steps; ++i, alpha *= 0.5) {
    ForwardPassResult fp;
    fp.alpha = alpha;
    fp.trajectory.reserve(T + 1);
    fp.controls.reserve(T);
    fp.trajectory.push_back(nominal_traj[0]);
    bool overflow = false;
    for (size_t k = 0; k < T; ++k) {
      const Vec u = nominal_controls[k] + alpha * bp.feedforward[k] +
                    bp.feedback[k] * (fp.trajectory.back() - nominal_traj[k]);
      fp.controls.push_back(u);
      try {
        fp.trajectory.push_back(problem.model.step(fp.trajectory.back(), u));
      } catch (const NumericOverflow&) {
        overflow = true;
        break;
      }
    }
    if (overflow) continue;

    fp.breakdown = trajectory_cost(problem.cost, fp.trajectory, fp.controls,
                                   0.0, /*use_effective_terminal=*/false);
    const double expected = -(alpha * bp.expected_decrease_1 +
                              alpha * alpha * bp.expected_decrease_2);
    const double actual = nominal_cost - fp.breakdown.total;
    if (expected <= zero_band) {
      // Already at a stationary point: accept any non-degrading rollout.
      if (actual >= -zero_band) return fp;
    } else if (actual >= options.armijo * expected) {
      return fp;
    }
  }
  return std::nullopt;
}

namespace {

// LM schedule: escalation enters at reg_init, then multiplies by reg_scale.
double escalate(double reg, const SolverOptions& o) {
  return reg < o.reg_init ? o.reg_init : reg * o.reg_scale;
}

}  // namespace

SolveResult solve_fhocp(const Problem& problem, int T,
                        const std::vector<Vec>& init_controls,
                        const SolverOptions& options) {
  if (T < 1) throw ContractViolation("solve_fhocp: T must be >= 1");
  const int n = problem.model.state_dim();
  if (problem.cost.goal.size() != n || problem.cost.Q.rows() != n ||
      problem.cost.Q_T.rows() != n ||
      problem.cost.R.rows() != problem.model.control_dim())
    throw ContractViolation("solve_fhocp: cost dimension mismatch");
  if (!(problem.cost.beta > 0.0 && problem.cost.beta <= 1.0))
    throw ContractViolation("solve_fhocp: beta must lie in (0, 1]");
  if (problem.x0.size() != problem.model.state_dim())
    throw ContractViolation("solve_fhocp: x0 dimension mismatch");
  if (!init_controls.empty() && static_cast<int>(init_controls.size()) != T)
    throw ContractViolation("solve_fhocp: init_controls must have length T");

  const int p = problem.model.control_dim();
  std::vector<Vec> controls =
      init_controls.empty() ? std::vector<Vec>(T, Vec::Zero(p)) : init_controls;
  std::vector<Vec> traj = problem.model.rollout(problem.x0, controls);
  CostBreakdown breakdown =
      trajectory_cost(problem.cost, traj, controls, 0.0, false);

  SolveResult result;
  double reg = options.reg_min;
  std::optional<BackwardPassResult> last_bp;

  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    std::vector<Model::Linearization> lins;
    std::vector<QuadExpansion> expansions;
    lins.reserve(T);
    expansions.reserve(T);
    for (int k = 0; k < T; ++k) {
      lins.push_back(problem.model.linearize(traj[k], controls[k]));
      expansions.push_back(quadratize_stage(problem.cost, traj[k], controls[k], k));
    }
    const QuadExpansion term = quadratize_terminal(problem.cost, traj.back(), T);

    std::optional<BackwardPassResult> bp;
    while (!(bp = backward_pass(lins, expansions, term, reg))) {
      reg = escalate(reg, options);
      if (reg > options.reg_max)
        throw SolverDiverged("solve_fhocp: Q_uu indefinite at reg_max", traj,
                             controls);
    }
    last_bp = bp;

    auto fp = forward_pass(problem, traj, controls, breakdown.total, *bp, options);
    if (!fp) {
      reg = escalate(reg, options);
      if (reg > options.reg_max) {
        const double expected =
            -(bp->expected_decrease_1 + bp->expected_decrease_2);
        if (expected <= options.cost_tolerance *
                            std::max(1.0, std::abs(breakdown.total))) {
          result.converged = true;  // no predicted improvement left
          break;
        }
        throw SolverDiverged("solve_fhocp: line search failed at reg_max", traj,
                             controls);
      }
      continue;
    }

    const double prev = breakdown.total;
    traj = std::move(fp->trajectory);
    controls = std::move(fp->controls);
    breakdown = fp->breakdown;
    reg = std::max(reg / options.reg_scale, options.reg_min);

    if (prev - breakdown.total <=
        options.cost_tolerance * std::max(1.0, std::abs(prev))) {
      result.converged = true;
      break;
    }
  }

  result.trajectory = std::move(traj);
  result.controls = std::move(controls);
  result.breakdown = breakdown;
  result.terminal_phi = terminal_cost(problem.cost, result.trajectory.back());
  result.iterations = iter;
  if (last_bp) result.feedback_gains = std::move(last_bp->feedback);
  return result;
}

}  // namespace freehorizon
