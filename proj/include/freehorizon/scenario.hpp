#pragma once

#include <filesystem>
#include <vector>

#include "freehorizon/config.hpp"
#include "freehorizon/diagnostics.hpp"

namespace freehorizon {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Formats a double with 17 significant digits ('.' decimal separator).
std::string format_number(double v);

void write_sweep_csv(const std::vector<SweepRecord>& records,
                     const std::filesystem::path& path);

void write_trajectory_csv(const SolveResult& sol, const Problem& problem,
                          const std::filesystem::path& path);

void write_msweep_csv(const std::vector<MSweepEntry>& entries,
                      const std::filesystem::path& path);

void write_discounted_csv(const DiscountedResult& result,
                          const std::filesystem::path& path);

void write_checks_jsonl(const std::vector<CheckReport>& reports,
                        const std::filesystem::path& path);

enum class Command { solve, sweep, msweep, discounted, check };

struct RunArgs {
  int horizon = 0;                  // solve
  std::vector<double> m_values;     // msweep
  double beta = 0.0;                // discounted (0 = use config beta)
  int budget = 1500;                // discounted
};

/// Executes one command against a scenario, writing artifact files plus
/// manifest.json into config.output_dir. Returns the process exit status
/// (0 on success; for `check`, 0 only if every report passed).
int run_scenario(const ScenarioConfig& config, Command command,
                 const RunArgs& args, const std::string& config_text);

}  // namespace freehorizon
