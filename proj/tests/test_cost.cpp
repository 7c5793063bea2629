#include <doctest.h>

#include <cmath>
#include <random>

#include "freehorizon/cost.hpp"

using namespace freehorizon;

namespace {

CostSpec simple_spec(int n, int p) {
  CostSpec spec;
  spec.goal = Vec::Zero(n);
  spec.Q = Mat::Identity(n, n);
  spec.R = Mat::Identity(p, p);
  spec.Q_T = Mat::Identity(n, n);
  return spec;
}

const double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("stage cost: zero at the goal with zero control") {
  auto spec = simple_spec(3, 2);
  spec.goal << 1.0, -2.0, 0.5;
  CHECK(stage_cost(spec, spec.goal, Vec::Zero(2)) == 0.0);
}

TEST_CASE("stage cost: hand-computed quadratic") {
  auto spec = simple_spec(2, 1);
  Vec x(2);
  x << 1, 2;
  Vec u(1);
  u << 3;
  CHECK(stage_cost(spec, x, u) == doctest::Approx(14.0));
}

TEST_CASE("stage cost: strictly positive away from (goal, 0)") {
  auto spec = simple_spec(4, 2);
  spec.goal << 0.3, 0.1, -0.2, 0.0;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Vec x(4), u(2);
    for (int j = 0; j < 4; ++j) x(j) = dist(rng);
    for (int j = 0; j < 2; ++j) u(j) = dist(rng);
    if ((x - spec.goal).norm() < 1e-12 && u.norm() < 1e-12) continue;
    CHECK(stage_cost(spec, x, u) > 0.0);
  }
}

TEST_CASE("terminal cost: zero at goal, hand arithmetic elsewhere") {
  CostSpec spec = simple_spec(4, 2);
  spec.goal << 1, 4, kPi / 2, 0;
  spec.Q_T = Vec{(Vec(4) << 1, 1, 0.1, 0.1).finished()}.asDiagonal();
  CHECK(terminal_cost(spec, spec.goal) == 0.0);
  Vec x = spec.goal;
  x(0) += 1.0;
  x(1) += 4.0;
  x(2) += kPi / 6;
  const double expected = 1.0 + 16.0 + 0.1 * (kPi / 6) * (kPi / 6);
  CHECK(terminal_cost(spec, x) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("terminal set membership agrees with the sub-level definition") {
  auto spec = simple_spec(3, 2);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double M = 0.7;
  for (int i = 0; i < 100; ++i) {
    Vec x(3);
    for (int j = 0; j < 3; ++j) x(j) = dist(rng);
    CHECK(in_terminal_set(spec, x, M) == (terminal_cost(spec, x) <= M));
  }
}

TEST_CASE("effective terminal: max of phi and M") {
  auto spec = simple_spec(2, 1);
  Vec x(2);
  x << 0.1, 0.1;  // phi = 0.02
  CHECK(effective_terminal(spec, x, 0.05) == doctest::Approx(0.05));
  x << 0.5, 0.2;  // phi = 0.29 + eps
  CHECK(effective_terminal(spec, x, 0.05) ==
        doctest::Approx(terminal_cost(spec, x)));
  CHECK(effective_terminal(spec, x, 0.0) ==
        doctest::Approx(terminal_cost(spec, x)));
}

TEST_CASE("terminal set nesting across levels") {
  auto spec = simple_spec(3, 1);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double m1 = 0.2, m2 = 0.8;
  for (int i = 0; i < 200; ++i) {
    Vec x(3);
    for (int j = 0; j < 3; ++j) x(j) = dist(rng);
    if (in_terminal_set(spec, x, m1)) CHECK(in_terminal_set(spec, x, m2));
  }
}

TEST_CASE("quadratize: stationary at the goal, discount-independent at beta 1") {
  auto spec = simple_spec(3, 2);
  spec.goal << 0.4, -0.1, 0.2;
  const auto e0 = quadratize_stage(spec, spec.goal, Vec::Zero(2), 0);
  CHECK(e0.c_x.norm() == 0.0);
  CHECK(e0.c_u.norm() == 0.0);

  Vec x(3), u(2);
  x << 1, 2, 3;
  u << -1, 0.5;
  const auto e_k0 = quadratize_stage(spec, x, u, 0);
  const auto e_k7 = quadratize_stage(spec, x, u, 7);
  CHECK((e_k0.c_x - e_k7.c_x).norm() == 0.0);
  CHECK((e_k0.c_xx - e_k7.c_xx).norm() == 0.0);
  CHECK(e_k0.value == e_k7.value);
}

TEST_CASE("quadratize: discount weighting is exactly beta^k") {
  auto spec = simple_spec(2, 1);
  auto discounted = spec;
  discounted.beta = 0.9;
  Vec x(2), u(1);
  x << 0.7, -0.3;
  u << 0.2;
  for (int k : {0, 1, 5, 13}) {
    const double w = std::pow(0.9, k);
    const auto e1 = quadratize_stage(spec, x, u, k);
    const auto eb = quadratize_stage(discounted, x, u, k);
    CHECK((eb.c_x - w * e1.c_x).norm() <= 1e-15);
    CHECK((eb.c_uu - w * e1.c_uu).norm() <= 1e-15);
    CHECK(eb.value == doctest::Approx(w * e1.value).epsilon(1e-14));
  }
}

TEST_CASE("quadratize: derivative blocks match central finite differences") {
  CostSpec spec = simple_spec(3, 2);
  spec.Q << 2, 0.3, 0, 0.3, 1, 0, 0, 0, 0.5;
  spec.R << 0.4, 0.1, 0.1, 0.6;
  spec.goal << 0.2, -0.5, 1.0;
  spec.beta = 0.95;
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    Vec x(3), u(2);
    for (int j = 0; j < 3; ++j) x(j) = dist(rng);
    for (int j = 0; j < 2; ++j) u(j) = dist(rng);
    const int k = trial % 9;
    const double w = std::pow(spec.beta, k);
    const auto e = quadratize_stage(spec, x, u, k);
    for (int i = 0; i < 3; ++i) {
      Vec xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd =
          w * (stage_cost(spec, xp, u) - stage_cost(spec, xm, u)) / (2 * h);
      CHECK(e.c_x(i) == doctest::Approx(fd).epsilon(1e-6));
    }
    for (int i = 0; i < 2; ++i) {
      Vec up = u, um = u;
      up(i) += h;
      um(i) -= h;
      const double fd =
          w * (stage_cost(spec, x, up) - stage_cost(spec, x, um)) / (2 * h);
      CHECK(e.c_u(i) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("trajectory cost: empty horizon at the goal returns M") {
  auto spec = simple_spec(2, 1);
  const auto b = trajectory_cost(spec, {spec.goal}, {}, 0.05, true);
  CHECK(b.transfer == 0.0);
  CHECK(b.total == doctest::Approx(0.05));
}

TEST_CASE("trajectory cost: effective terminal dominates the raw one") {
  auto spec = simple_spec(2, 1);
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec> traj;
    std::vector<Vec> controls;
    for (int k = 0; k < 6; ++k) {
      Vec x(2);
      x << dist(rng), dist(rng);
      traj.push_back(x);
      if (k < 5) controls.push_back(Vec::Constant(1, dist(rng)));
    }
    const double M = 0.3;
    const auto with = trajectory_cost(spec, traj, controls, M, true);
    const auto without = trajectory_cost(spec, traj, controls, M, false);
    CHECK(with.total >= without.total);
    const bool equal = std::abs(with.total - without.total) < 1e-15;
    CHECK(equal == (terminal_cost(spec, traj.back()) >= M));
  }
}

TEST_CASE("trajectory cost: discount telescoping over a split") {
  CostSpec spec = simple_spec(2, 1);
  spec.beta = 0.93;
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vec> traj;
  std::vector<Vec> controls;
  const int T = 12, T_head = 5;
  for (int k = 0; k <= T; ++k) {
    Vec x(2);
    x << dist(rng), dist(rng);
    traj.push_back(x);
    if (k < T) controls.push_back(Vec::Constant(1, dist(rng)));
  }
  const auto full = trajectory_cost(spec, traj, controls, 0.0, false);
  std::vector<Vec> head_t(traj.begin(), traj.begin() + T_head + 1);
  std::vector<Vec> head_c(controls.begin(), controls.begin() + T_head);
  std::vector<Vec> tail_t(traj.begin() + T_head, traj.end());
  std::vector<Vec> tail_c(controls.begin() + T_head, controls.end());
  const auto head = trajectory_cost(spec, head_t, head_c, 0.0, false);
  const auto tail = trajectory_cost(spec, tail_t, tail_c, 0.0, false);
  const double recomposed =
      head.transfer + std::pow(spec.beta, T_head) * tail.total;
  CHECK(recomposed == doctest::Approx(full.total).epsilon(1e-10));
}

TEST_CASE("trajectory cost: length mismatch rejected") {
  auto spec = simple_spec(2, 1);
  std::vector<Vec> traj(3, Vec::Zero(2));
  std::vector<Vec> controls(3, Vec::Zero(1));
  CHECK_THROWS_AS(trajectory_cost(spec, traj, controls, 0.0, false),
                  ContractViolation);
}

TEST_CASE("cost spec validation catches bad matrices") {
  auto spec = simple_spec(2, 1);
  CHECK_NOTHROW(spec.validate(2, 1));
  spec.R(0, 0) = 0.0;
  CHECK_THROWS_AS(spec.validate(2, 1), ContractViolation);
  spec = simple_spec(2, 1);
  spec.beta = 1.5;
  CHECK_THROWS_AS(spec.validate(2, 1), ContractViolation);
}
