#include "freehorizon/dynamics.hpp"

#include <cmath>

namespace freehorizon {

ModelId model_id_from_string(const std::string& name) {
  if (name == "car_like") return ModelId::car_like;
  if (name == "unicycle") return ModelId::unicycle;
  if (name == "double_integrator") return ModelId::double_integrator;
  throw ContractViolation("unknown model id: " + name);
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::car_like: return "car_like";
    case ModelId::unicycle: return "unicycle";
    case ModelId::double_integrator: return "double_integrator";
  }
  return "?";
}

namespace {

int state_dim_of(ModelId id) {
  switch (id) {
    case ModelId::car_like: return 4;
    case ModelId::unicycle: return 3;
    case ModelId::double_integrator: return 2;
  }
  return 0;
}

int control_dim_of(ModelId id) {
  switch (id) {
    case ModelId::car_like: return 2;
    case ModelId::unicycle: return 2;
    case ModelId::double_integrator: return 1;
  }
  return 0;
}

}  // namespace

Model::Model(ModelId id, ModelParams params)
    : id_(id), params_(params), n_(state_dim_of(id)), p_(control_dim_of(id)) {
  if (params_.dt <= 0.0) throw ContractViolation("dt must be > 0");
  if (id_ == ModelId::car_like && params_.wheelbase <= 0.0)
    throw ContractViolation("wheelbase must be > 0");
}

void Model::check_dims(const Vec& x, const Vec& u) const {
  if (x.size() != n_ || u.size() != p_)
    throw ContractViolation("state/control dimension mismatch for model " +
                            to_string(id_));
}

Vec Model::continuous_derivative(const Vec& x, const Vec& u) const {
  check_dims(x, u);
  Vec dx(n_);
  switch (id_) {
    case ModelId::car_like: {
      // states (px, py, theta, v), inputs (accel, steering angle)
      const double theta = x(2), v = x(3);
      dx(0) = v * std::cos(theta);
      dx(1) = v * std::sin(theta);
      dx(2) = v * std::tan(u(1)) / params_.wheelbase;
      dx(3) = u(0);
      break;
    }
    case ModelId::unicycle: {
      // states (px, py, theta), inputs (v, omega)
      const double theta = x(2);
      dx(0) = u(0) * std::cos(theta);
      dx(1) = u(0) * std::sin(theta);
      dx(2) = u(1);
      break;
    }
    case ModelId::double_integrator: {
      dx(0) = x(1);
      dx(1) = u(0);
      break;
    }
  }
  return dx;
}

Vec Model::step(const Vec& x, const Vec& u, double dt) const {
  if (dt <= 0.0) throw ContractViolation("step: dt must be > 0");
  const Vec k1 = continuous_derivative(x, u);
  const Vec k2 = continuous_derivative(x + 0.5 * dt * k1, u);
  const Vec k3 = continuous_derivative(x + 0.5 * dt * k2, u);
  const Vec k4 = continuous_derivative(x + dt * k3, u);
  Vec next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite())
    throw NumericOverflow("non-finite state after RK4 step of model " +
                          to_string(id_));
  return next;
}

Model::Linearization Model::linearize(const Vec& x, const Vec& u,
                                      double dt) const {
  check_dims(x, u);
  Linearization lin;
  lin.x = x;
  lin.u = u;
  lin.A.resize(n_, n_);
  lin.B.resize(n_, p_);
  for (int i = 0; i < n_; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    lin.A.col(i) = (step(xp, u, dt) - step(xm, u, dt)) / (2.0 * h);
  }
  for (int j = 0; j < p_; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(u(j)));
    Vec up = u, um = u;
    up(j) += h;
    um(j) -= h;
    lin.B.col(j) = (step(x, up, dt) - step(x, um, dt)) / (2.0 * h);
  }
  return lin;
}

std::vector<Vec> Model::rollout(const Vec& x0, const std::vector<Vec>& controls,
                                double dt) const {
  std::vector<Vec> traj;
  traj.reserve(controls.size() + 1);
  traj.push_back(x0);
  for (size_t k = 0; k < controls.size(); ++k) {
    try {
      traj.push_back(step(traj.back(), controls[k], dt));
    } catch (const NumericOverflow&) {
      throw NumericOverflow("rollout overflow at step " + std::to_string(k));
    }
  }
  return traj;
}

}  // namespace freehorizon
