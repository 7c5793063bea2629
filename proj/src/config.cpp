#include "freehorizon/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace freehorizon {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& what, const std::string& key,
                       int line) {
  std::ostringstream msg;
  msg << what << ": '" << key << "' (line " << line << ")";
  throw ParseError(msg.str());
}

double parse_double(const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail("invalid number", key, e.line);
  }
}

int parse_int(const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    const int v = std::stoi(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail("invalid integer", key, e.line);
  }
}

bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail("invalid boolean (use true/false)", key, e.line);
}

std::vector<double> parse_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail("empty element in list", key, e.line);
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail("invalid number in list", key, e.line);
    }
  }
  if (out.empty()) fail("empty list", key, e.line);
  return out;
}

Vec parse_vector(const Entry& e, const std::string& key, int n) {
  const auto vals = parse_list(e, key);
  if (static_cast<int>(vals.size()) != n)
    fail("expected " + std::to_string(n) + " elements", key, e.line);
  return Eigen::Map<const Vec>(vals.data(), n);
}

// n values -> diagonal matrix; n*n values -> full matrix, row major.
Mat parse_matrix(const Entry& e, const std::string& key, int n) {
  const auto vals = parse_list(e, key);
  if (static_cast<int>(vals.size()) == n)
    return Eigen::Map<const Vec>(vals.data(), n).asDiagonal();
  if (static_cast<int>(vals.size()) == n * n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = vals[i * n + j];
    return m;
  }
  fail("expected " + std::to_string(n) + " (diagonal) or " +
           std::to_string(n * n) + " (full) elements",
       key, e.line);
}

class Ini {
 public:
  explicit Ini(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("malformed section header", line, lineno);
        section = trim(line.substr(1, line.size() - 2));
        if (!known_sections_.count(section))
          fail("unknown section", section, lineno);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected key = value", line, lineno);
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail("empty key", line, lineno);
      auto [it, inserted] =
          sections_[section].emplace(key, Entry{value, lineno, false});
      if (!inserted) fail("duplicate key", key, lineno);
    }
  }

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  const Entry& require(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e)
      throw ParseError("missing required key '" + key + "' in [" + section + "]");
    return *e;
  }

  void reject_unused() const {
    for (const auto& [section, entries] : sections_) {
      for (const auto& [key, entry] : entries) {
        if (!entry.used)
          fail("unknown key in [" + section + "]", key, entry.line);
      }
    }
  }

 private:
  std::map<std::string, Section> sections_;
  const std::set<std::string> known_sections_{"model", "cost", "sweep", "solver"};
};

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  Ini ini(text);
  ScenarioConfig cfg;

  cfg.model_id = model_id_from_string(ini.require("model", "model").value);
  const int n = Model(cfg.model_id, {}).state_dim();
  const int p = Model(cfg.model_id, {}).control_dim();

  cfg.model_params.dt = cfg.model_id == ModelId::car_like    ? 0.01
                        : cfg.model_id == ModelId::unicycle ? 0.05
                                                            : 0.1;
  if (const Entry* e = ini.find("model", "dt")) {
    cfg.model_params.dt = parse_double(*e, "dt");
    if (cfg.model_params.dt <= 0.0) fail("dt must be > 0", "dt", e->line);
  }
  if (const Entry* e = ini.find("model", "wheelbase")) {
    if (cfg.model_id != ModelId::car_like)
      fail("wheelbase only applies to car_like", "wheelbase", e->line);
    cfg.model_params.wheelbase = parse_double(*e, "wheelbase");
    if (cfg.model_params.wheelbase <= 0.0)
      fail("wheelbase must be > 0", "wheelbase", e->line);
  }
  cfg.x0 = parse_vector(ini.require("model", "x0"), "x0", n);

  cfg.cost.goal = parse_vector(ini.require("cost", "goal"), "goal", n);
  cfg.cost.Q = parse_matrix(ini.require("cost", "Q"), "Q", n);
  cfg.cost.R = parse_matrix(ini.require("cost", "R"), "R", p);
  cfg.cost.Q_T = parse_matrix(ini.require("cost", "QT"), "QT", n);
  {
    const Entry& e = ini.require("cost", "M");
    cfg.M = parse_double(e, "M");
    if (cfg.M <= 0.0) fail("M must be > 0", "M", e.line);
  }
  if (const Entry* e = ini.find("cost", "beta")) {
    cfg.cost.beta = parse_double(*e, "beta");
    if (!(cfg.cost.beta > 0.0 && cfg.cost.beta <= 1.0))
      fail("beta must lie in (0, 1]", "beta", e->line);
  }

  if (const Entry* e = ini.find("sweep", "t_min"))
    cfg.sweep.t_min = parse_int(*e, "t_min");
  if (const Entry* e = ini.find("sweep", "t_max"))
    cfg.sweep.t_max = parse_int(*e, "t_max");
  if (const Entry* e = ini.find("sweep", "t_step"))
    cfg.sweep.t_step = parse_int(*e, "t_step");
  if (const Entry* e = ini.find("sweep", "refine"))
    cfg.sweep.refine = parse_bool(*e, "refine");
  if (const Entry* e = ini.find("sweep", "parallel"))
    cfg.sweep.parallel = parse_bool(*e, "parallel");
  if (cfg.sweep.t_min < 1 || cfg.sweep.t_min > cfg.sweep.t_max ||
      cfg.sweep.t_step < 1)
    throw ParseError("invalid [sweep] bounds: need 1 <= t_min <= t_max, t_step >= 1");
  if (const Entry* e = ini.find("sweep", "output_dir"))
    cfg.output_dir = e->value;

  if (const Entry* e = ini.find("solver", "max_iterations"))
    cfg.solver.max_iterations = parse_int(*e, "max_iterations");
  if (const Entry* e = ini.find("solver", "cost_tolerance"))
    cfg.solver.cost_tolerance = parse_double(*e, "cost_tolerance");
  if (const Entry* e = ini.find("solver", "reg_init"))
    cfg.solver.reg_init = parse_double(*e, "reg_init");
  if (const Entry* e = ini.find("solver", "reg_min"))
    cfg.solver.reg_min = parse_double(*e, "reg_min");
  if (const Entry* e = ini.find("solver", "reg_max"))
    cfg.solver.reg_max = parse_double(*e, "reg_max");
  if (const Entry* e = ini.find("solver", "reg_scale"))
    cfg.solver.reg_scale = parse_double(*e, "reg_scale");
  if (const Entry* e = ini.find("solver", "line_search_steps"))
    cfg.solver.line_search_steps = parse_int(*e, "line_search_steps");
  if (cfg.solver.max_iterations < 1 || cfg.solver.cost_tolerance <= 0.0 ||
      !(0.0 < cfg.solver.reg_min && cfg.solver.reg_min <= cfg.solver.reg_init &&
        cfg.solver.reg_init <= cfg.solver.reg_max) ||
      cfg.solver.reg_scale <= 1.0 || cfg.solver.line_search_steps < 1)
    throw ParseError("invalid [solver] options");

  ini.reject_unused();

  cfg.cost.validate(n, p);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace freehorizon
