#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "hopfkit/config.hpp"
#include "hopfkit/control.hpp"
#include "hopfkit/hopf.hpp"
#include "hopfkit/stability.hpp"
#include "hopfkit/steady.hpp"
#include "hopfkit/timeint.hpp"

namespace hopfkit {

namespace detail {

inline nlohmann::json echo_config(const RunConfig& cfg, const DynamicalSystem& sys) {
  nlohmann::json model;
  model["name"] = cfg.model_name;
  // effective parameters, defaults included
  if (auto* fhn = dynamic_cast<const models::Fhn*>(&sys)) {
    const auto& p = fhn->params();
    model["a"] = p.a; model["b"] = p.b; model["c1"] = p.c1; model["c2"] = p.c2; model["c3"] = p.c3;
  } else if (auto* bru = dynamic_cast<const models::Brusselator*>(&sys)) {
    model["a"] = bru->params().a;
    model["b"] = bru->params().b;
  } else if (auto* cgl = dynamic_cast<const models::CglBase*>(&sys)) {
    const auto& p = cgl->params();
    model["mu"] = p.mu; model["nu"] = p.nu; model["c3"] = p.c3; model["c5"] = p.c5;
    if (sys.name() == "cgl2d") {
      model["nx"] = p.nx; model["ny"] = p.ny; model["l1"] = p.l1; model["l2"] = p.l2;
    } else {
      model["n"] = p.nx; model["l"] = p.l;
    }
  }
  auto range = sys.default_lambda_range();
  double lmin = std::isnan(cfg.lambda_min) ? range.first : cfg.lambda_min;
  double lmax = std::isnan(cfg.lambda_max) ? range.second : cfg.lambda_max;

  nlohmann::json task;
  task["mode"] = cfg.mode;
  task["lambda_min"] = lmin;
  task["lambda_max"] = lmax;
  task["steps"] = cfg.steps;
  task["k_eigs"] = cfg.k_eigs;
  task["newton_tol"] = cfg.newton_tol;
  task["hopf_tol"] = cfg.hopf_tol;
  task["seed"] = cfg.seed;
  if (cfg.mode == "control") {
    task["objective"] = cfg.objective_kind;
    task["target"] = cfg.target;
    task["control"] = cfg.control;
    task["eps_J"] = cfg.eps_J;
    task["g_tol"] = cfg.g_tol;
    task["max_iter"] = cfg.max_iter;
    double theta0 = sys.control(cfg.control);
    double d0 = cfg.delta0 > 0 ? cfg.delta0 : 0.1 * (1 + std::abs(theta0));
    task["delta0"] = d0;
    task["delta_max"] = cfg.delta_max > 0 ? cfg.delta_max : 10 * d0;
    task["eta"] = cfg.eta;
    task["guard_c"] = cfg.guard_c;
    task["lower"] = std::isfinite(cfg.lower) ? nlohmann::json(cfg.lower) : nlohmann::json();
    task["upper"] = std::isfinite(cfg.upper) ? nlohmann::json(cfg.upper) : nlohmann::json();
  }
  if (cfg.mode == "simulate") {
    task["lambda"] = cfg.lambda_sim;
    task["t_end"] = cfg.t_end;
    task["rtol"] = cfg.rtol;
    task["atol"] = cfg.atol;
    task["sample_dt"] = cfg.sample_dt;
    task["component"] = cfg.component;
    task["transient_frac"] = cfg.transient_frac;
  }
  nlohmann::json j;
  j["model"] = model;
  j["task"] = task;
  j["inner_product"] = "quadrature_weighted";
  return j;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p);
  os << content;
}

}  // namespace detail

/// Execute one configured task, writing artifacts into out_dir.
/// Returns 0 on success, 1 on solver/optimizer failure.
inline int run(const RunConfig& cfg, const std::string& out_dir_override = "",
               bool verbose = false) {
  namespace fs = std::filesystem;
  fs::path out = out_dir_override.empty() ? fs::path(cfg.out_dir) : fs::path(out_dir_override);
  fs::create_directories(out);

  SystemPtr sys = make_system(cfg);
  nlohmann::json summary;
  summary["artifact_version"] = "0.1.0";
  summary["config"] = detail::echo_config(cfg, *sys);
  summary["failed"] = false;

  auto fail = [&](const std::string& msg) {
    summary["failed"] = true;
    summary["error"] = msg;
    std::ofstream(out / "summary.json") << summary.dump(2) << "\n";
    if (verbose) std::cerr << "error: " << msg << "\n";
    return 1;
  };

  auto range = sys->default_lambda_range();
  double lmin = std::isnan(cfg.lambda_min) ? range.first : cfg.lambda_min;
  double lmax = std::isnan(cfg.lambda_max) ? range.second : cfg.lambda_max;

  Vector u0 = sys->initial_state();
  if (!cfg.u0.empty()) {
    if (static_cast<int>(cfg.u0.size()) != sys->dim())
      return fail("u0 length does not match model dimension");
    u0 = Eigen::Map<const Vector>(cfg.u0.data(), static_cast<Eigen::Index>(cfg.u0.size()));
  }

  try {
    if (cfg.mode == "simulate") {
      Vector start = u0;
      if (cfg.u0.empty()) start(0) += 0.01;  // perturb off the steady state
      double dt = cfg.sample_dt > 0 ? cfg.sample_dt : cfg.t_end / 2000.0;
      Trajectory traj = rk45(*sys, start, cfg.lambda_sim, 0.0, cfg.t_end, cfg.rtol, cfg.atol, dt);
      std::ofstream os(out / "trajectory.csv");
      traj.write_csv(os);
      summary["results"]["samples"] = traj.times.size();
      try {
        auto pe = estimate_period(traj, cfg.component, cfg.transient_frac);
        summary["results"]["period"] = pe.period;
        summary["results"]["period_stddev"] = pe.stddev;
        summary["results"]["cycles"] = pe.cycles;
      } catch (const std::exception&) {
        summary["results"]["period"] = nullptr;
      }
    } else {
      if (verbose) std::cerr << "continuation over [" << lmin << ", " << lmax << "]\n";
      ContinuationTrace trace =
          continue_branch(*sys, u0, lmin, lmax, cfg.steps, cfg.k_eigs, cfg.newton_tol);
      {
        std::ofstream os(out / "trace.csv");
        trace.write_csv(os);
      }
      if (trace.truncated) return fail("continuation failed: " + trace.failure);
      summary["results"]["trace_records"] = trace.records.size();

      if (cfg.mode != "continue") {
        int near_axis = 0;
        HopfGuess guess = build_hopf_guess(*sys, trace, cfg.k_eigs, &near_axis);
        if (near_axis > 1)
          summary["results"]["warning"] =
              "multiple candidate pairs within 1e-3 of the imaginary axis";
        HopfPoint hp = solve_hopf(*sys, guess, sys->normalization(), cfg.hopf_tol);
        std::ofstream(out / "hopf.json") << hp.to_json().dump(2) << "\n";
        summary["results"]["lambda"] = hp.state.lambda;
        summary["results"]["mu"] = hp.state.mu;
        summary["results"]["period"] = 2 * M_PI / hp.state.mu;
        summary["results"]["residual"] = hp.residual_norm;
        summary["results"]["eig_gap"] = hp.eig_gap;

        if (cfg.mode == "control") {
          ControlProblem prob;
          prob.sys = sys;
          prob.control = cfg.control;
          prob.objective = Objective(cfg.objective_kind == "location" ? ObjectiveKind::location
                                                                      : ObjectiveKind::frequency,
                                     cfg.target);
          prob.lower = cfg.lower;
          prob.upper = cfg.upper;
          prob.eps_J = cfg.eps_J;
          prob.g_tol = cfg.g_tol;
          prob.max_iter = cfg.max_iter;
          prob.tr.delta0 = cfg.delta0;
          prob.tr.delta_max = cfg.delta_max;
          prob.tr.eta = cfg.eta;
          prob.guard_C = cfg.guard_c;
          prob.hopf_tol = cfg.hopf_tol;
          OptimizeResult res = optimize_hopf(prob, hp);
          {
            std::ofstream os(out / "optlog.csv");
            res.log.write_csv(os);
          }
          std::ofstream(out / "hopf.json") << res.hopf.to_json().dump(2) << "\n";
          summary["results"][cfg.control] = res.theta;
          summary["results"]["J"] = evaluate_objective(prob.objective, res.hopf);
          summary["results"]["accepted_steps"] = res.accepted_steps;
          summary["results"]["termination"] = res.termination;
          summary["results"]["lambda"] = res.hopf.state.lambda;
          summary["results"]["mu"] = res.hopf.state.mu;
          summary["results"]["period"] = 2 * M_PI / res.hopf.state.mu;
          summary["results"]["residual"] = res.hopf.residual_norm;
          summary["results"]["eig_gap"] = res.hopf.eig_gap;
        }
      }
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  std::ofstream(out / "summary.json") << summary.dump(2) << "\n";
  if (verbose) std::cerr << "wrote artifacts to " << out << "\n";
  return 0;
}

}  // namespace hopfkit
