#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "freehorizon/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw freehorizon::IoError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run(freehorizon::Command command, const std::string& config_path,
        const std::string& output_override, const freehorizon::RunArgs& args) {
  const std::string text = slurp(config_path);
  freehorizon::ScenarioConfig cfg = freehorizon::parse_config(text);
  if (!output_override.empty()) cfg.output_dir = output_override;
  return freehorizon::run_scenario(cfg, command, args, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-final-time trajectory optimization into a terminal set"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  freehorizon::RunArgs args;
  std::string m_values_arg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config file")->required();
    cmd->add_option("--output", output_dir, "output directory override");
  };

  auto* solve = app.add_subcommand("solve", "fixed-horizon solve");
  add_common(solve);
  solve->add_option("--horizon", args.horizon, "horizon T (steps)")->required();

  auto* sweep = app.add_subcommand("sweep", "horizon sweep to the first hit");
  add_common(sweep);

  auto* msweep = app.add_subcommand("msweep", "terminal-set-level sweep");
  add_common(msweep);
  msweep->add_option("--m-values", m_values_arg,
                     "comma-separated M values, descending")
      ->required();

  auto* discounted = app.add_subcommand("discounted", "discounted sweep");
  add_common(discounted);
  discounted->add_option("--beta", args.beta, "discount factor in (0,1)");
  discounted->add_option("--budget", args.budget, "horizon budget (steps)");

  auto* check = app.add_subcommand("check", "run structural checks");
  add_common(check);

  CLI11_PARSE(app, argc, argv);

  freehorizon::Command command = freehorizon::Command::solve;
  if (sweep->parsed()) command = freehorizon::Command::sweep;
  else if (msweep->parsed()) command = freehorizon::Command::msweep;
  else if (discounted->parsed()) command = freehorizon::Command::discounted;
  else if (check->parsed()) command = freehorizon::Command::check;

  try {
    if (!m_values_arg.empty()) {
      std::stringstream ss(m_values_arg);
      std::string item;
      while (std::getline(ss, item, ',')) args.m_values.push_back(std::stod(item));
    }
    return run(command, config_path, output_dir, args);
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()},
                       {"command", app.get_subcommands().front()->get_name()}};
    std::cerr << err.dump() << std::endl;
    return 2;
  }
}
