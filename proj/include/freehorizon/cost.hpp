#pragma once

#include <vector>

#include "freehorizon/dynamics.hpp"

namespace freehorizon {

/// Quadratic incremental and terminal costs about a goal state, with an
/// optional geometric discount. beta = 1 is the undiscounted problem.
struct CostSpec {
  Vec goal;
  Mat Q;    // state weight, PSD
  Mat R;    // control weight, PD
  Mat Q_T;  // terminal weight
  double beta = 1.0;

  void validate(int n, int p) const;
};

struct QuadExpansion {
  Vec c_x;
  Vec c_u;
  Mat c_xx;
  Mat c_uu;
  Mat c_ux;
  double value = 0.0;
};

struct CostBreakdown {
  double transfer = 0.0;
  double terminal = 0.0;
  double total = 0.0;
};

double stage_cost(const CostSpec& spec, const Vec& x, const Vec& u);

/// phi(x) = (x - goal)' Q_T (x - goal)
double terminal_cost(const CostSpec& spec, const Vec& x);

/// max(phi(x), M): the terminal payoff that makes loitering inside the
/// sublevel set {phi <= M} pointless.
double effective_terminal(const CostSpec& spec, const Vec& x, double M);

bool in_terminal_set(const CostSpec& spec, const Vec& x, double M);

/// Exact quadratic expansion of the stage cost at (x, u), scaled by beta^k.
QuadExpansion quadratize_stage(const CostSpec& spec, const Vec& x, const Vec& u,
                               int k);

/// Expansion of the terminal cost phi at x, scaled by beta^T.
QuadExpansion quadratize_terminal(const CostSpec& spec, const Vec& x, int T);

/// Discounted cost of a trajectory: transfer = sum beta^k c(x_k, u_k),
/// terminal = beta^T * (max(phi, M) when use_effective_terminal, else phi).
CostBreakdown trajectory_cost(const CostSpec& spec, const std::vector<Vec>& traj,
                              const std::vector<Vec>& controls, double M,
                              bool use_effective_terminal);

}  // namespace freehorizon
