#pragma once

#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "hopfkit/hopf.hpp"
#include "hopfkit/io.hpp"
#include "hopfkit/system.hpp"

namespace hopfkit {

enum class ObjectiveKind { location, frequency };

/// Relative quadratic functional on the Hopf location or frequency.
struct Objective {
  ObjectiveKind kind;
  double target;

  Objective(ObjectiveKind k, double t) : kind(k), target(t) {
    if (t == 0) throw std::invalid_argument("objective target must be nonzero");
  }

  double value(double lambda, double mu) const {
    double x = kind == ObjectiveKind::location ? lambda : mu;
    double d = x - target;
    return d * d / (target * target);
  }
  double d_lambda(double lambda, double) const {
    return kind == ObjectiveKind::location ? 2 * (lambda - target) / (target * target) : 0.0;
  }
  double d_mu(double, double mu) const {
    return kind == ObjectiveKind::frequency ? 2 * (mu - target) / (target * target) : 0.0;
  }
};

inline double evaluate_objective(const Objective& obj, const HopfPoint& hp) {
  return obj.value(hp.state.lambda, hp.state.mu);
}

/// dJ/dtheta through the extended constraint: solve G_X s = -G_theta and read
/// off the lambda / mu sensitivity.
inline double reduced_gradient(const DynamicalSystem& sys, const HopfPoint& hp,
                               const std::string& control, const Objective& obj,
                               const Vector& c) {
  const int n = sys.dim();
  const GRState& X = hp.state;
  Matrix GX = gr_jacobian(sys, X, c);
  Vector Gt(3 * n + 2);
  Gt.segment(0, n) = sys.d_control(X.u, X.lambda, control);
  Gt.segment(n, n) = sys.d_control_jac_action(X.u, X.lambda, X.v, control);
  Gt.segment(2 * n, n) = sys.d_control_jac_action(X.u, X.lambda, X.w, control);
  Gt(3 * n) = 0;
  Gt(3 * n + 1) = 0;
  Vector s = linalg::lu_solve(GX, Vector(-Gt));
  return obj.d_lambda(X.lambda, X.mu) * s(3 * n) + obj.d_mu(X.lambda, X.mu) * s(3 * n + 1);
}

struct TrustRegionSettings {
  double delta0 = -1;     // < 0: 0.1 * (1 + |theta0|)
  double delta_max = -1;  // < 0: 10 * delta0
  double eta = 0.1;       // acceptance threshold on the reduction ratio
};

struct ControlProblem {
  SystemPtr sys;
  std::string control;
  Objective objective{ObjectiveKind::location, 1.0};
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double eps_J = 1e-10;
  double g_tol = 1e-8;
  int max_iter = 100;
  TrustRegionSettings tr;
  double guard_C = 0.5;       // branch guard ||u+ - u|| <= C ||u+||
  double hopf_tol = 1e-10;
  Vector c_override;          // empty: use the model's normalization function
};

struct OptimizationLog {
  struct Entry {
    int k;
    bool accepted;
    double theta, J, lambda, mu, radius;
  };
  std::vector<Entry> entries;

  void write_csv(std::ostream& os) const {
    os << "iter,accepted,theta,J,lambda,mu,radius\n";
    for (const auto& e : entries)
      os << e.k << "," << (e.accepted ? 1 : 0) << "," << io::fmt(e.theta) << "," << io::fmt(e.J)
         << "," << io::fmt(e.lambda) << "," << io::fmt(e.mu) << "," << io::fmt(e.radius) << "\n";
  }
};

struct OptimizeResult {
  double theta;
  SystemPtr sys;  // system at the optimized control value
  HopfPoint hopf;
  OptimizationLog log;
  int accepted_steps = 0;
  std::string termination;  // "J_tol", "g_tol", "max_iter"
};

struct OptimizationStalledError : std::runtime_error {
  OptimizationStalledError() : std::runtime_error("optimization stalled") {}
};

namespace detail {

inline Vector problem_normalization(const ControlProblem& prob, const DynamicalSystem& sys) {
  return prob.c_override.size() > 0 ? prob.c_override : sys.normalization();
}

}  // namespace detail

/// Trust-region loop over a scalar control. Each trial re-solves the extended
/// system warm-started from the incumbent; trials are rejected (radius halved)
/// on solver failure, a failed ratio test, or a branch-guard violation.
inline OptimizeResult optimize_hopf(const ControlProblem& prob, const HopfPoint& initial) {
  if (!(prob.tr.eta > 0 && prob.tr.eta < 0.25))
    throw std::invalid_argument("optimize_hopf: eta must lie in (0, 0.25)");
  if (prob.guard_C <= 0) throw std::invalid_argument("optimize_hopf: guard constant must be positive");

  SystemPtr sys = prob.sys;
  double theta = sys->control(prob.control);
  double delta0 = prob.tr.delta0 > 0 ? prob.tr.delta0 : 0.1 * (1 + std::abs(theta));
  double delta_max = prob.tr.delta_max > 0 ? prob.tr.delta_max : 10 * delta0;
  if (delta0 <= 0) throw std::invalid_argument("optimize_hopf: delta0 must be positive");
  double delta = delta0;

  HopfPoint hp = initial;
  Vector c = detail::problem_normalization(prob, *sys);
  double J = evaluate_objective(prob.objective, hp);
  double g = reduced_gradient(*sys, hp, prob.control, prob.objective, c);
  double B = std::max(std::abs(g) / delta0, 1e-12);  // secant curvature, seeded from the gradient

  OptimizeResult out;
  out.log.entries.push_back({0, true, theta, J, hp.state.lambda, hp.state.mu, delta});

  auto finish = [&](const std::string& why) {
    out.theta = theta;
    out.sys = sys;
    out.hopf = hp;
    out.termination = why;
    return out;
  };

  for (int k = 1; k <= prob.max_iter; ++k) {
    if (J <= prob.eps_J) return finish("J_tol");
    if (std::abs(g) <= prob.g_tol) return finish("g_tol");

    // 1-D trust-region subproblem on the quadratic model J + g p + B p^2 / 2
    double p;
    if (B > 0 && std::abs(g / B) <= delta)
      p = -g / B;
    else
      p = -delta * (g > 0 ? 1.0 : -1.0);
    double theta_trial = std::clamp(theta + p, prob.lower, prob.upper);
    p = theta_trial - theta;

    auto reject = [&](double trial_J, double lam, double mu) {
      out.log.entries.push_back({k, false, theta_trial, trial_J, lam, mu, delta});
      delta *= 0.5;
      if (delta < 1e-12) throw OptimizationStalledError();
    };

    if (p == 0) {
      reject(J, hp.state.lambda, hp.state.mu);
      continue;
    }
    double predicted = -(g * p + 0.5 * B * p * p);

    SystemPtr sys_trial = sys->with_control(prob.control, theta_trial);
    Vector c_trial = detail::problem_normalization(prob, *sys_trial);
    HopfPoint hp_trial;
    try {
      HopfGuess warm{hp.state.u, hp.state.lambda, hp.state.mu, hp.state.v, hp.state.w};
      hp_trial = solve_hopf(*sys_trial, warm, c_trial, prob.hopf_tol);
    } catch (const std::exception&) {
      reject(std::numeric_limits<double>::quiet_NaN(),
             std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
      continue;
    }

    // branch guard, skipped on (near-)trivial branches
    double nu_trial = sys_trial->norm(hp_trial.state.u);
    if (nu_trial >= 1e-10 &&
        sys_trial->norm(hp_trial.state.u - hp.state.u) > prob.guard_C * nu_trial) {
      reject(evaluate_objective(prob.objective, hp_trial), hp_trial.state.lambda,
             hp_trial.state.mu);
      continue;
    }

    double J_trial = evaluate_objective(prob.objective, hp_trial);
    double rho = predicted > 0 ? (J - J_trial) / predicted : -1.0;
    if (rho < prob.tr.eta) {
      reject(J_trial, hp_trial.state.lambda, hp_trial.state.mu);
      continue;
    }

    // accepted
    double g_trial = reduced_gradient(*sys_trial, hp_trial, prob.control, prob.objective, c_trial);
    double B_sec = (g_trial - g) / p;
    if (B_sec > 0) B = B_sec;
    if (rho > 0.75 && std::abs(p) >= 0.8 * delta) delta = std::min(2 * delta, delta_max);
    sys = sys_trial;
    theta = theta_trial;
    hp = hp_trial;
    J = J_trial;
    g = g_trial;
    ++out.accepted_steps;
    out.log.entries.push_back({k, true, theta, J, hp.state.lambda, hp.state.mu, delta});
  }
  return finish("max_iter");
}

}  // namespace hopfkit
