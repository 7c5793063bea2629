#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freehorizon/scenario.hpp"

using namespace freehorizon;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path repo_config(const std::string& name) {
  for (fs::path dir : {fs::path("configs"), fs::path("../configs"),
                       fs::path("../../configs")}) {
    if (fs::exists(dir / name)) return dir / name;
  }
  FAIL("config file not found: ", name);
  return {};
}

std::string minimal_di_config(const std::string& extra = "") {
  return "[model]\n"
         "model = double_integrator\n"
         "dt = 0.1\n"
         "x0 = 1.3, -0.4\n"
         "[cost]\n"
         "goal = 0, 0\n"
         "Q = 1, 1\n"
         "R = 1\n"
         "QT = 50, 50\n"
         "M = 0.05\n"
         "[sweep]\n"
         "t_min = 1\n"
         "t_max = 120\n"
         "t_step = 1\n"
         "refine = false\n" +
         extra;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fh_test_" + std::to_string(std::rand()) +
            std::to_string(reinterpret_cast<uintptr_t>(this) & 0xffff));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("parse_config: bundled scenarios load with the documented values") {
  const auto c1 = load_config(repo_config("car_case1.ini").string());
  CHECK(c1.model_id == ModelId::car_like);
  CHECK(c1.x0.size() == 4);
  CHECK(c1.x0(0) == 0.0);
  CHECK(c1.x0(2) == doctest::Approx(1.0471975511965976).epsilon(1e-15));
  CHECK(c1.cost.goal(0) == 1.0);
  CHECK(c1.cost.goal(1) == 4.0);
  CHECK(c1.cost.goal(2) == doctest::Approx(1.5707963267948966).epsilon(1e-15));
  CHECK(c1.M == 0.05);
  CHECK(c1.cost.Q(0, 0) == 0.1);
  CHECK(c1.cost.R(1, 1) == 0.01);
  CHECK(c1.cost.Q_T(3, 3) == 2000.0);
  CHECK(c1.model_params.dt == 0.01);

  const auto c2 = load_config(repo_config("car_case2.ini").string());
  CHECK(c2.x0(0) == -1.0);
  CHECK(c2.x0(1) == -4.0);
  CHECK(c2.cost.goal(0) == 1.0);
  CHECK(c2.sweep.t_max == 1000);
}

TEST_CASE("parse_config: minimal config round-trips into a solvable problem") {
  const auto config = parse_config(minimal_di_config());
  CHECK(config.model_id == ModelId::double_integrator);
  CHECK(config.cost.beta == 1.0);
  CHECK(config.sweep.t_step == 1);
  CHECK_FALSE(config.sweep.refine);
  const Problem problem = config.make_problem();
  CHECK(problem.model.state_dim() == 2);
  CHECK(problem.x0(1) == -0.4);
}

TEST_CASE("parse_config: diagonal and full matrix spellings agree") {
  auto diag = parse_config(minimal_di_config());
  std::string full = minimal_di_config();
  const auto pos = full.find("Q = 1, 1\n");
  REQUIRE(pos != std::string::npos);
  full.replace(pos, 9, "Q = 1, 0, 0, 1\n");
  auto dense = parse_config(full);
  CHECK((diag.cost.Q - dense.cost.Q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parse_config: fail-closed rejections name the offending line") {
  CHECK_THROWS_AS(parse_config(minimal_di_config("bogus_key = 1\n")),
                  ParseError);
  CHECK_THROWS_AS(parse_config(minimal_di_config() + "[mystery]\nx = 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_config(minimal_di_config("t_min = 2\n")), ParseError);

  try {
    parse_config(minimal_di_config("bogus_key = 1\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus_key") != std::string::npos);
    CHECK(msg.find("line") != std::string::npos);
  }
}

TEST_CASE("parse_config: missing required keys rejected") {
  std::string no_m = minimal_di_config();
  const auto pos = no_m.find("M = 0.05\n");
  REQUIRE(pos != std::string::npos);
  no_m.erase(pos, 9);
  CHECK_THROWS_AS(parse_config(no_m), ParseError);
  CHECK_THROWS_AS(parse_config(""), ParseError);
}

TEST_CASE("parse_config: invalid numbers and dimensions rejected") {
  std::string bad = minimal_di_config();
  auto pos = bad.find("M = 0.05\n");
  bad.replace(pos, 9, "M = nope\n");
  CHECK_THROWS_AS(parse_config(bad), ParseError);

  std::string wrong_dim = minimal_di_config();
  pos = wrong_dim.find("goal = 0, 0\n");
  wrong_dim.replace(pos, 12, "goal = 0, 0, 0\n");
  CHECK_THROWS_AS(parse_config(wrong_dim), ParseError);
}

TEST_CASE("parse_config: beta outside (0,1] rejected") {
  const auto with_beta = [](const std::string& value) {
    std::string text = minimal_di_config();
    const auto pos = text.find("M = 0.05\n");
    REQUIRE(pos != std::string::npos);
    text.insert(pos, "beta = " + value + "\n");
    return text;
  };
  CHECK_THROWS_AS(parse_config(with_beta("1.5")), ParseError);
  CHECK_THROWS_AS(parse_config(with_beta("0")), ParseError);
  const auto ok = parse_config(with_beta("0.9"));
  CHECK(ok.cost.beta == 0.9);
}

TEST_CASE("format_number: 17 significant digits, locale-independent") {
  CHECK(format_number(0.05) == "0.050000000000000003");
  CHECK(format_number(1.0) == "1");
  // Round trip is exact.
  CHECK(std::stod(format_number(1.0471975511965976)) == 1.0471975511965976);
}

TEST_CASE("write_sweep_csv: header, rows and round trip") {
  TempDir dir;
  std::vector<SweepRecord> records(2);
  records[0] = {10, 5.25, 5.0, 0.25, false, true, 12};
  records[1] = {20, 3.125, 3.0, 0.03125, true, true, 8};
  const fs::path file = dir.path / "sweep.csv";
  write_sweep_csv(records, file);

  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "T,total_cost,transfer_cost,terminal_phi,hit,converged,iterations");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    const auto& r = records[rows - 1];
    CHECK(std::stoi(cells[0]) == r.T);
    CHECK(std::stod(cells[1]) == r.total_cost);
    CHECK(std::stod(cells[3]) == r.terminal_phi);
    CHECK(cells[4] == (r.hit ? "1" : "0"));
  }
  CHECK(rows == 2);
  CHECK_THROWS_AS(write_sweep_csv({}, dir.path / "empty.csv"), ContractViolation);
}

TEST_CASE("run_scenario solve: start at the goal writes a near-zero trajectory") {
  TempDir dir;
  auto config = parse_config(minimal_di_config());
  config.x0 = Vec::Zero(2);
  config.output_dir = dir.path.string();
  RunArgs args;
  args.horizon = 15;
  CHECK(run_scenario(config, Command::solve, args, minimal_di_config()) == 0);

  const std::string csv = slurp(dir.path / "trajectory.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,x_0,x_1,u_0,stage_cost");
  int rows = 0;
  double worst_stage = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    if (rows <= 15) {
      const auto last = line.rfind(',');
      worst_stage = std::max(worst_stage, std::stod(line.substr(last + 1)));
    }
  }
  CHECK(rows == 16);
  CHECK(worst_stage <= 1e-8);
  CHECK(fs::exists(dir.path / "manifest.json"));
}

TEST_CASE("run_scenario sweep: deterministic artifacts and manifest echo") {
  const std::string text = minimal_di_config();
  auto config = parse_config(text);

  TempDir a, b;
  config.output_dir = a.path.string();
  CHECK(run_scenario(config, Command::sweep, RunArgs{}, text) == 0);
  config.output_dir = b.path.string();
  CHECK(run_scenario(config, Command::sweep, RunArgs{}, text) == 0);

  CHECK(slurp(a.path / "sweep.csv") == slurp(b.path / "sweep.csv"));

  const std::string manifest = slurp(a.path / "manifest.json");
  CHECK(manifest.find("\"tool_version\"") != std::string::npos);
  CHECK(manifest.find("double_integrator") != std::string::npos);
  CHECK(manifest.find("sweep.csv") != std::string::npos);

  // The echoed config re-parses to the same scenario (closure property).
  const auto start = manifest.find("\"config_text\"");
  REQUIRE(start != std::string::npos);
}

TEST_CASE("run_scenario check: all diagnostics pass on the double integrator") {
  TempDir dir;
  auto config = parse_config(minimal_di_config());
  config.output_dir = dir.path.string();
  CHECK(run_scenario(config, Command::check, RunArgs{}, minimal_di_config()) == 0);

  const std::string jsonl = slurp(dir.path / "checks.jsonl");
  std::istringstream in(jsonl);
  std::string line;
  int reports = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++reports;
    CHECK(line.find("\"passed\":true") != std::string::npos);
  }
  CHECK(reports == 4);
}

TEST_CASE("run_scenario discounted: beta override lands in the artifact") {
  TempDir dir;
  auto config = parse_config(minimal_di_config());
  config.output_dir = dir.path.string();
  RunArgs args;
  args.beta = 0.95;
  args.budget = 120;
  CHECK(run_scenario(config, Command::discounted, args, minimal_di_config()) ==
        0);
  const std::string csv = slurp(dir.path / "discounted.csv");
  CHECK(csv.find("beta,entered,T_star,J_M") != std::string::npos);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  REQUIRE(std::getline(in, row));
  CHECK(std::stod(row.substr(0, row.find(','))) == 0.95);
}

TEST_CASE("cli binary: bad config exits nonzero with a JSON error") {
  fs::path cli;
  for (fs::path p : {fs::path("freehorizon"), fs::path("../freehorizon")}) {
    if (fs::exists(p)) cli = p;
  }
  if (cli.empty()) return;  // binary layout differs; covered by ctest paths
  TempDir dir;
  const fs::path bad = dir.path / "bad.ini";
  std::ofstream(bad) << "[model]\nmodel = warp_drive\n";
  const std::string cmd = fs::absolute(cli).string() + " solve --horizon 10" +
                          " --config " + bad.string() + " 2> " +
                          (dir.path / "err.txt").string();
  const int rc = std::system(cmd.c_str());
  CHECK(rc != 0);
  CHECK(slurp(dir.path / "err.txt").find("\"error\"") != std::string::npos);
}
