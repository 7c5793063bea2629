#include "freehorizon/cost.hpp"

#include <cmath>

namespace freehorizon {

void CostSpec::validate(int n, int p) const {
  if (goal.size() != n) throw ContractViolation("goal dimension mismatch");
  if (Q.rows() != n || Q.cols() != n) throw ContractViolation("Q must be n x n");
  if (R.rows() != p || R.cols() != p) throw ContractViolation("R must be p x p");
  if (Q_T.rows() != n || Q_T.cols() != n)
    throw ContractViolation("Q_T must be n x n");
  if (!(beta > 0.0 && beta <= 1.0))
    throw ContractViolation("beta must lie in (0, 1]");
  Eigen::SelfAdjointEigenSolver<Mat> eq(Q), er(R), et(Q_T);
  if (eq.eigenvalues().minCoeff() < -1e-12)
    throw ContractViolation("Q must be positive semidefinite");
  if (er.eigenvalues().minCoeff() <= 0.0)
    throw ContractViolation("R must be positive definite");
  if (et.eigenvalues().minCoeff() <= 0.0)
    throw ContractViolation("Q_T must be positive definite");
}

double stage_cost(const CostSpec& spec, const Vec& x, const Vec& u) {
  if (x.size() != spec.goal.size() || u.size() != spec.R.rows())
    throw ContractViolation("stage_cost dimension mismatch");
  const Vec dx = x - spec.goal;
  return dx.dot(spec.Q * dx) + u.dot(spec.R * u);
}

double terminal_cost(const CostSpec& spec, const Vec& x) {
  if (x.size() != spec.goal.size())
    throw ContractViolation("terminal_cost dimension mismatch");
  const Vec dx = x - spec.goal;
  return dx.dot(spec.Q_T * dx);
}

double effective_terminal(const CostSpec& spec, const Vec& x, double M) {
  if (M < 0.0) throw ContractViolation("M must be >= 0");
  return std::max(terminal_cost(spec, x), M);
}

bool in_terminal_set(const CostSpec& spec, const Vec& x, double M) {
  return terminal_cost(spec, x) <= M;
}

QuadExpansion quadratize_stage(const CostSpec& spec, const Vec& x, const Vec& u,
                               int k) {
  const double w = std::pow(spec.beta, k);
  const Vec dx = x - spec.goal;
  QuadExpansion e;
  e.c_x = w * 2.0 * (spec.Q * dx);
  e.c_u = w * 2.0 * (spec.R * u);
  e.c_xx = w * 2.0 * spec.Q;
  e.c_uu = w * 2.0 * spec.R;
  e.c_ux = Mat::Zero(u.size(), x.size());
  e.value = w * (dx.dot(spec.Q * dx) + u.dot(spec.R * u));
  return e;
}

QuadExpansion quadratize_terminal(const CostSpec& spec, const Vec& x, int T) {
  const double w = std::pow(spec.beta, T);
  const Vec dx = x - spec.goal;
  QuadExpansion e;
  e.c_x = w * 2.0 * (spec.Q_T * dx);
  e.c_u = Vec::Zero(spec.R.rows());
  e.c_xx = w * 2.0 * spec.Q_T;
  e.c_uu = Mat::Zero(spec.R.rows(), spec.R.cols());
  e.c_ux = Mat::Zero(spec.R.rows(), x.size());
  e.value = w * dx.dot(spec.Q_T * dx);
  return e;
}

CostBreakdown trajectory_cost(const CostSpec& spec, const std::vector<Vec>& traj,
                              const std::vector<Vec>& controls, double M,
                              bool use_effective_terminal) {
  if (traj.size() != controls.size() + 1)
    throw ContractViolation("trajectory_cost: need T controls and T+1 states");
  CostBreakdown b;
  double w = 1.0;
  for (size_t k = 0; k < controls.size(); ++k) {
    b.transfer += w * stage_cost(spec, traj[k], controls[k]);
    w *= spec.beta;
  }
  const double phi = terminal_cost(spec, traj.back());
  b.terminal = w * (use_effective_terminal ? std::max(phi, M) : phi);
  b.total = b.transfer + b.terminal;
  return b;
}

}  // namespace freehorizon
