#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace freehorizon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when inputs violate an operation's contract (dimension
/// mismatches, out-of-range parameters).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an integration or solve produces non-finite values.
struct NumericOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ModelId { car_like, unicycle, double_integrator };

ModelId model_id_from_string(const std::string& name);
std::string to_string(ModelId id);

struct ModelParams {
  double wheelbase = 1.0;  // car_like only
  double dt = 0.01;        // seconds
};

/// Immutable dynamics model: continuous derivative, RK4 discrete map,
/// finite-difference linearization.
class Model {
 public:
  Model(ModelId id, ModelParams params);

  ModelId id() const { return id_; }
  const ModelParams& params() const { return params_; }
  int state_dim() const { return n_; }
  int control_dim() const { return p_; }
  double dt() const { return params_.dt; }

  Vec continuous_derivative(const Vec& x, const Vec& u) const;

  /// One RK4 step with zero-order-hold control. This is the discrete map
  /// x_{k+1} = f(x_k, u_k) everything downstream optimizes over.
  Vec step(const Vec& x, const Vec& u, double dt) const;
  Vec step(const Vec& x, const Vec& u) const { return step(x, u, params_.dt); }

  struct Linearization {
    Mat A;  // n x n, df/dx
    Mat B;  // n x p, df/du
    Vec x;
    Vec u;
  };

  /// Jacobians of step() by central finite differences,
  /// h_i = 1e-6 * max(1, |z_i|) per coordinate.
  Linearization linearize(const Vec& x, const Vec& u, double dt) const;
  Linearization linearize(const Vec& x, const Vec& u) const {
    return linearize(x, u, params_.dt);
  }

  std::vector<Vec> rollout(const Vec& x0, const std::vector<Vec>& controls,
                           double dt) const;
  std::vector<Vec> rollout(const Vec& x0, const std::vector<Vec>& controls) const {
    return rollout(x0, controls, params_.dt);
  }

 private:
  void check_dims(const Vec& x, const Vec& u) const;

  ModelId id_;
  ModelParams params_;
  int n_;
  int p_;
};

}  // namespace freehorizon
