#pragma once

#include <vector>

#include "freehorizon/horizon.hpp"

namespace freehorizon {

struct OracleFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckSample {
  int index = 0;
  double violation = 0.0;
};

struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::vector<CheckSample> details;
};

struct DareSolution {
  Mat P;
  Mat K;
  int iterations = 0;
};

/// Fixed point of the discrete Riccati map, iterated from P0 (default Q)
/// until the infinity-norm change drops below 1e-12.
DareSolution dare_fixed_point(const Mat& A, const Mat& B, const Mat& Q,
                              const Mat& R);
DareSolution dare_fixed_point(const Mat& A, const Mat& B, const Mat& Q,
                              const Mat& R, const Mat& P0);

/// AC-OCP cost-to-go at state x, re-solved by a unit-step sweep around the
/// expected remaining horizon, warm-started from seed_controls. States inside
/// the terminal set have cost-to-go M by definition.
double resolve_cost_to_go(const Problem& problem, double M, const Vec& x,
                          int expected_T, const std::vector<Vec>& seed_controls,
                          const SolverOptions& options);

/// Bellman identity J(x_k) = c(x_k,u_k) + beta * J(x_{k+1}) along the AC-OCP
/// trajectory, sampled every `stride` steps; each J re-solved independently.
/// Violations are relative to the largest resolved cost-to-go.
CheckReport check_bellman_consistency(const ACResult& ac, const Problem& problem,
                                      double M, int stride,
                                      const SolverOptions& options,
                                      double tolerance = 1e-3);

/// Decrease of the recomputed cost-to-go by at least the stage cost at every
/// step outside the terminal set.
CheckReport check_lyapunov_decrease(const ACResult& ac, const Problem& problem,
                                    double M, const SolverOptions& options);

/// Finite-difference Jacobians against an independent forward-difference
/// computation at seeded random points.
CheckReport check_jacobians(const Model& model, int n_samples, unsigned seed);

}  // namespace freehorizon
