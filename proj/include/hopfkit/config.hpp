#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hopfkit/models/brusselator.hpp"
#include "hopfkit/models/cgl.hpp"
#include "hopfkit/models/fhn.hpp"
#include "hopfkit/system.hpp"

namespace hopfkit {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One run = one task. Sectioned key=value format: [model], [task], [output].
struct RunConfig {
  std::string model_name;
  std::map<std::string, double> model_params;  // numeric overrides, validated per model

  std::string mode;  // continue | locate | control | simulate
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
  int steps = 9;
  int k_eigs = 6;
  double newton_tol = 1e-10;
  double hopf_tol = 1e-10;

  std::string objective_kind;  // location | frequency
  double target = std::numeric_limits<double>::quiet_NaN();
  std::string control;
  double eps_J = 1e-10;
  double g_tol = 1e-8;
  int max_iter = 100;
  double delta0 = -1;
  double delta_max = -1;
  double eta = 0.1;
  double guard_c = 0.5;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  double lambda_sim = std::numeric_limits<double>::quiet_NaN();
  double t_end = std::numeric_limits<double>::quiet_NaN();
  double rtol = 1e-8;
  double atol = 1e-10;
  double sample_dt = 0;
  std::vector<double> u0;
  int component = 0;
  double transient_frac = 0.5;

  unsigned seed = 0;
  std::string out_dir = ".";
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& model_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"fhn", {"a", "b", "c1", "c2", "c3"}},
      {"brusselator", {"a", "b"}},
      {"cgl2d", {"mu", "nu", "c3", "c5", "nx", "ny", "l1", "l2"}},
      {"cgl1d", {"mu", "nu", "c3", "c5", "n", "l"}},
  };
  return keys;
}

inline double parse_double(const std::string& val, int line) {
  try {
    size_t pos = 0;
    double x = std::stod(val, &pos);
    if (pos != val.size() || !std::isfinite(x))
      throw ConfigError("line " + std::to_string(line) + ": expected finite number, got '" + val + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected number, got '" + val + "'");
  }
}

inline int parse_int(const std::string& val, int line) {
  double x = parse_double(val, line);
  if (x != std::floor(x))
    throw ConfigError("line " + std::to_string(line) + ": expected integer, got '" + val + "'");
  return static_cast<int>(x);
}

inline std::vector<double> parse_list(const std::string& val, int line) {
  std::vector<double> out;
  std::stringstream ss(val);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, line));
  return out;
}

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool saw_model = false, saw_task = false;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::trim(raw);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = detail::trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = line.substr(1, line.size() - 2);
      if (section != "model" && section != "task" && section != "output")
        throw ConfigError("unknown section: [" + section + "]");
      if (section == "model") saw_model = true;
      if (section == "task") saw_task = true;
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");

    if (section == "model") {
      if (key == "name") {
        if (!detail::model_keys().count(val)) throw ConfigError("unknown model: " + val);
        cfg.model_name = val;
      } else {
        cfg.model_params[key] = detail::parse_double(val, lineno);
      }
    } else if (section == "task") {
      if (key == "mode") cfg.mode = val;
      else if (key == "lambda_min") cfg.lambda_min = detail::parse_double(val, lineno);
      else if (key == "lambda_max") cfg.lambda_max = detail::parse_double(val, lineno);
      else if (key == "steps") cfg.steps = detail::parse_int(val, lineno);
      else if (key == "k_eigs") cfg.k_eigs = detail::parse_int(val, lineno);
      else if (key == "newton_tol") cfg.newton_tol = detail::parse_double(val, lineno);
      else if (key == "hopf_tol") cfg.hopf_tol = detail::parse_double(val, lineno);
      else if (key == "objective") cfg.objective_kind = val;
      else if (key == "target") cfg.target = detail::parse_double(val, lineno);
      else if (key == "control") cfg.control = val;
      else if (key == "eps_J") cfg.eps_J = detail::parse_double(val, lineno);
      else if (key == "g_tol") cfg.g_tol = detail::parse_double(val, lineno);
      else if (key == "max_iter") cfg.max_iter = detail::parse_int(val, lineno);
      else if (key == "delta0") cfg.delta0 = detail::parse_double(val, lineno);
      else if (key == "delta_max") cfg.delta_max = detail::parse_double(val, lineno);
      else if (key == "eta") cfg.eta = detail::parse_double(val, lineno);
      else if (key == "guard_c") cfg.guard_c = detail::parse_double(val, lineno);
      else if (key == "lower") cfg.lower = detail::parse_double(val, lineno);
      else if (key == "upper") cfg.upper = detail::parse_double(val, lineno);
      else if (key == "lambda") cfg.lambda_sim = detail::parse_double(val, lineno);
      else if (key == "t_end") cfg.t_end = detail::parse_double(val, lineno);
      else if (key == "rtol") cfg.rtol = detail::parse_double(val, lineno);
      else if (key == "atol") cfg.atol = detail::parse_double(val, lineno);
      else if (key == "sample_dt") cfg.sample_dt = detail::parse_double(val, lineno);
      else if (key == "u0") cfg.u0 = detail::parse_list(val, lineno);
      else if (key == "component") cfg.component = detail::parse_int(val, lineno);
      else if (key == "transient_frac") cfg.transient_frac = detail::parse_double(val, lineno);
      else if (key == "seed") cfg.seed = static_cast<unsigned>(detail::parse_int(val, lineno));
      else throw ConfigError("unknown key: " + key + " in [task]");
    } else {  // output
      if (key == "dir") cfg.out_dir = val;
      else throw ConfigError("unknown key: " + key + " in [output]");
    }
  }

  if (!saw_model || cfg.model_name.empty()) throw ConfigError("missing key: name in [model]");
  for (const auto& [k, v] : cfg.model_params)
    if (!detail::model_keys().at(cfg.model_name).count(k))
      throw ConfigError("unknown key: " + k + " for model " + cfg.model_name);

  if (!saw_task || cfg.mode.empty()) throw ConfigError("missing key: mode in [task]");
  if (cfg.mode != "continue" && cfg.mode != "locate" && cfg.mode != "control" &&
      cfg.mode != "simulate")
    throw ConfigError("unknown mode: " + cfg.mode);
  if (cfg.mode == "control") {
    if (cfg.objective_kind.empty()) throw ConfigError("missing key: objective");
    if (cfg.objective_kind != "location" && cfg.objective_kind != "frequency")
      throw ConfigError("unknown objective: " + cfg.objective_kind);
    if (std::isnan(cfg.target)) throw ConfigError("missing key: target");
    if (cfg.control.empty()) throw ConfigError("missing key: control");
  }
  if (cfg.mode == "simulate") {
    if (std::isnan(cfg.lambda_sim)) throw ConfigError("missing key: lambda");
    if (std::isnan(cfg.t_end)) throw ConfigError("missing key: t_end");
  }
  if (cfg.steps < 2) throw ConfigError("steps must be >= 2");
  return cfg;
}

/// Instantiate the configured model with overrides applied.
inline SystemPtr make_system(const RunConfig& cfg) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = cfg.model_params.find(key);
    return it == cfg.model_params.end() ? fallback : it->second;
  };
  if (cfg.model_name == "fhn") {
    models::FhnParams p;
    p.a = get("a", p.a);
    p.b = get("b", p.b);
    p.c1 = get("c1", p.c1);
    p.c2 = get("c2", p.c2);
    p.c3 = get("c3", p.c3);
    return std::make_shared<models::Fhn>(p);
  }
  if (cfg.model_name == "brusselator") {
    models::BrusselatorParams p;
    p.a = get("a", p.a);
    p.b = get("b", p.b);
    return std::make_shared<models::Brusselator>(p);
  }
  models::CglParams p;
  p.mu = get("mu", p.mu);
  p.nu = get("nu", p.nu);
  p.c3 = get("c3", p.c3);
  p.c5 = get("c5", p.c5);
  if (cfg.model_name == "cgl2d") {
    p.nx = static_cast<int>(get("nx", p.nx));
    p.ny = static_cast<int>(get("ny", p.ny));
    p.l1 = get("l1", p.l1);
    p.l2 = get("l2", p.l2);
    return std::make_shared<models::Cgl2d>(p);
  }
  p.nx = static_cast<int>(get("n", 64));
  p.l = get("l", p.l);
  return std::make_shared<models::Cgl1d>(p);
}

}  // namespace hopfkit
