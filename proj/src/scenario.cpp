#include "freehorizon/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace freehorizon {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json report_to_json(const CheckReport& r) {
  json details = json::array();
  for (const auto& d : r.details)
    details.push_back({{"index", d.index}, {"violation", d.violation}});
  return json{{"name", r.name},
              {"passed", r.passed},
              {"worst_violation", r.worst_violation},
              {"tolerance", r.tolerance},
              {"details", details}};
}

constexpr const char* kToolVersion = "0.1.0";

}  // namespace

void write_sweep_csv(const std::vector<SweepRecord>& records,
                     const fs::path& path) {
  if (records.empty())
    throw ContractViolation("write_sweep_csv: records must be non-empty");
  auto out = open_out(path);
  out << "T,total_cost,transfer_cost,terminal_phi,hit,converged,iterations\n";
  for (const auto& r : records) {
    out << r.T << ',' << format_number(r.total_cost) << ','
        << format_number(r.transfer_cost) << ',' << format_number(r.terminal_phi)
        << ',' << (r.hit ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ','
        << r.iterations << '\n';
  }
}

void write_trajectory_csv(const SolveResult& sol, const Problem& problem,
                          const fs::path& path) {
  auto out = open_out(path);
  const int n = problem.model.state_dim();
  const int p = problem.model.control_dim();
  out << 'k';
  for (int i = 0; i < n; ++i) out << ",x_" << i;
  for (int i = 0; i < p; ++i) out << ",u_" << i;
  out << ",stage_cost\n";
  const size_t T = sol.controls.size();
  for (size_t k = 0; k <= T; ++k) {
    out << k;
    for (int i = 0; i < n; ++i)
      out << ',' << format_number(sol.trajectory[k](i));
    if (k < T) {
      for (int i = 0; i < p; ++i)
        out << ',' << format_number(sol.controls[k](i));
      out << ','
          << format_number(
                 stage_cost(problem.cost, sol.trajectory[k], sol.controls[k]));
    } else {
      for (int i = 0; i < p + 1; ++i) out << ',';  // no control at x_T
    }
    out << '\n';
  }
}

void write_msweep_csv(const std::vector<MSweepEntry>& entries,
                      const fs::path& path) {
  if (entries.empty())
    throw ContractViolation("write_msweep_csv: entries must be non-empty");
  auto out = open_out(path);
  out << "M,T_star,J_M,J_ref,gap\n";
  for (const auto& e : entries) {
    out << format_number(e.M) << ',' << e.T_star << ',' << format_number(e.J_M)
        << ',' << format_number(e.J_ref) << ',' << format_number(e.gap) << '\n';
  }
}

void write_discounted_csv(const DiscountedResult& result, const fs::path& path) {
  auto out = open_out(path);
  out << "beta,entered,T_star,J_M\n";
  out << format_number(result.beta) << ',' << (result.entered ? 1 : 0) << ',';
  if (result.T_star) out << *result.T_star;
  out << ',';
  if (result.J_M) out << format_number(*result.J_M);
  out << '\n';
}

void write_checks_jsonl(const std::vector<CheckReport>& reports,
                        const fs::path& path) {
  auto out = open_out(path);
  for (const auto& r : reports) out << report_to_json(r).dump() << '\n';
}

namespace {

json config_echo(const ScenarioConfig& cfg) {
  return json{
      {"model",
       {{"model", to_string(cfg.model_id)},
        {"wheelbase", cfg.model_params.wheelbase},
        {"dt", cfg.model_params.dt},
        {"x0", vec_to_json(cfg.x0)}}},
      {"cost",
       {{"goal", vec_to_json(cfg.cost.goal)},
        {"Q", mat_to_json(cfg.cost.Q)},
        {"R", mat_to_json(cfg.cost.R)},
        {"QT", mat_to_json(cfg.cost.Q_T)},
        {"M", cfg.M},
        {"beta", cfg.cost.beta}}},
      {"sweep",
       {{"t_min", cfg.sweep.t_min},
        {"t_max", cfg.sweep.t_max},
        {"t_step", cfg.sweep.t_step},
        {"refine", cfg.sweep.refine},
        {"parallel", cfg.sweep.parallel},
        {"output_dir", cfg.output_dir}}},
      {"solver",
       {{"max_iterations", cfg.solver.max_iterations},
        {"cost_tolerance", cfg.solver.cost_tolerance},
        {"reg_init", cfg.solver.reg_init},
        {"reg_min", cfg.solver.reg_min},
        {"reg_max", cfg.solver.reg_max},
        {"reg_scale", cfg.solver.reg_scale},
        {"line_search_steps", cfg.solver.line_search_steps}}}};
}

}  // namespace

int run_scenario(const ScenarioConfig& config, Command command,
                 const RunArgs& args, const std::string& config_text) {
  const auto t_start = std::chrono::steady_clock::now();
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);

  Problem problem = config.make_problem();
  std::vector<std::string> outputs;
  json phases = json::object();
  bool all_checks_passed = true;

  auto timed = [&](const std::string& name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    phases[name] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  };

  switch (command) {
    case Command::solve: {
      if (args.horizon < 1)
        throw ContractViolation("solve: --horizon must be >= 1");
      SolveResult sol;
      timed("solve", [&] {
        sol = solve_fhocp(problem, args.horizon, {}, config.solver);
      });
      write_trajectory_csv(sol, problem, dir / "trajectory.csv");
      outputs.push_back("trajectory.csv");
      break;
    }
    case Command::sweep: {
      ACResult ac;
      timed("sweep", [&] {
        ac = solve_acocp(problem, config.M, config.sweep, config.solver);
      });
      write_sweep_csv(ac.sweep, dir / "sweep.csv");
      outputs.push_back("sweep.csv");
      json j{{"T_star", ac.T_star},
             {"J_M", ac.J_M},
             {"M", config.M},
             {"transfer_cost", ac.solution.breakdown.transfer},
             {"terminal_phi", ac.solution.terminal_phi},
             {"converged", ac.solution.converged},
             {"iterations", ac.solution.iterations}};
      open_out(dir / "ac_result.json") << j.dump(2) << '\n';
      outputs.push_back("ac_result.json");
      write_trajectory_csv(ac.solution, problem, dir / "trajectory.csv");
      outputs.push_back("trajectory.csv");
      break;
    }
    case Command::msweep: {
      if (args.m_values.empty())
        throw ContractViolation("msweep: --m-values required");
      std::vector<MSweepEntry> entries;
      timed("msweep", [&] {
        entries = m_sweep(problem, args.m_values, config.sweep, config.solver);
      });
      write_msweep_csv(entries, dir / "msweep.csv");
      outputs.push_back("msweep.csv");
      break;
    }
    case Command::discounted: {
      Problem disc = problem;
      if (args.beta > 0.0) disc.cost.beta = args.beta;
      DiscountedResult result;
      timed("discounted", [&] {
        result = solve_discounted_acocp(disc, config.M, args.budget,
                                        config.sweep, config.solver);
      });
      write_discounted_csv(result, dir / "discounted.csv");
      outputs.push_back("discounted.csv");
      write_sweep_csv(result.sweep, dir / "sweep.csv");
      outputs.push_back("sweep.csv");
      break;
    }
    case Command::check: {
      std::vector<CheckReport> reports;
      timed("check", [&] {
        reports.push_back(check_jacobians(problem.model, 100, 7));

        // DARE oracle on its own golden instance (scalar fixed point).
        CheckReport dare;
        dare.name = "dare_oracle";
        dare.tolerance = 1e-9;
        const Mat one = Mat::Identity(1, 1);
        const auto sol = dare_fixed_point(one, one, one, one);
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        dare.worst_violation = std::abs(sol.P(0, 0) - golden);
        dare.details.push_back({0, dare.worst_violation});
        dare.passed = dare.worst_violation <= dare.tolerance;
        reports.push_back(dare);

        ACResult ac = solve_acocp(problem, config.M, config.sweep, config.solver);
        reports.push_back(check_bellman_consistency(ac, problem, config.M, 10,
                                                    config.solver));
        reports.push_back(
            check_lyapunov_decrease(ac, problem, config.M, config.solver));
      });
      write_checks_jsonl(reports, dir / "checks.jsonl");
      outputs.push_back("checks.jsonl");
      for (const auto& r : reports) all_checks_passed &= r.passed;
      break;
    }
  }

  json manifest{
      {"tool_version", kToolVersion},
      {"config_text", config_text},
      {"config", config_echo(config)},
      {"wall_clock_sec",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
           .count()},
      {"phases", phases},
      {"outputs", outputs}};
  manifest["outputs"].push_back("manifest.json");
  open_out(dir / "manifest.json") << manifest.dump(2) << '\n';

  return all_checks_passed ? 0 : 1;
}

}  // namespace freehorizon
