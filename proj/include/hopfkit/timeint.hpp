#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

#include "hopfkit/io.hpp"
#include "hopfkit/system.hpp"

namespace hopfkit {

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> step_sizes;  // accepted steps

  /// Columns: t, u_1, ..., u_n
  void write_csv(std::ostream& os) const {
    if (times.empty()) return;
    os << "t";
    for (Eigen::Index i = 0; i < states.front().size(); ++i) os << ",u_" << (i + 1);
    os << "\n";
    for (size_t k = 0; k < times.size(); ++k) {
      os << io::fmt(times[k]);
      for (Eigen::Index i = 0; i < states[k].size(); ++i) os << "," << io::fmt(states[k](i));
      os << "\n";
    }
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau
constexpr double dp_c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double dp_b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr double dp_b4[7] = {5179.0 / 57600,   0,           7571.0 / 16695, 393.0 / 640,
                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
// dense-output weights for the 4th-order interpolant
constexpr double dp_d[7] = {-12715105075.0 / 11282082432.0, 0,
                            87487479700.0 / 32700410799.0,  -10690763975.0 / 1880347072.0,
                            701980252875.0 / 199316789632.0, -1453857185.0 / 822651844.0,
                            69997945.0 / 29380423.0};

}  // namespace detail

/// Adaptive explicit Runge-Kutta 5(4) for du/dt = rhs(t, u). If sample_dt > 0
/// the trajectory is sampled on a uniform grid through the dense-output
/// interpolant; otherwise accepted steps are stored.
inline Trajectory rk45_generic(const std::function<Vector(double, const Vector&)>& rhs,
                               const Vector& u0, double t0, double t1, double rtol, double atol,
                               double sample_dt = 0) {
  if (rtol <= 0 || atol <= 0) throw std::invalid_argument("rk45: tolerances must be positive");
  const double span = t1 - t0;
  if (span <= 0) throw std::invalid_argument("rk45: empty time span");
  const Eigen::Index n = u0.size();

  Trajectory traj;
  auto record = [&](double t, const Vector& u, double h) {
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.step_sizes.push_back(h);
  };

  double t = t0;
  Vector u = u0;
  Vector k[7];
  k[0] = rhs(t, u);
  double h = 1e-3 * span;
  double next_sample = t0;
  if (sample_dt <= 0) record(t, u, 0);

  while (t < t1) {
    if (h < 1e-12 * span) throw std::runtime_error("rk45: step size underflow");
    if (t + h > t1) h = t1 - t;

    for (int s = 1; s < 7; ++s) {
      Vector y = u;
      for (int j = 0; j < s; ++j) y += h * detail::dp_a[s][j] * k[j];
      k[s] = rhs(t + detail::dp_c[s] * h, y);
    }
    Vector u5 = u;
    for (int s = 0; s < 7; ++s)
      if (detail::dp_b5[s] != 0) u5 += h * detail::dp_b5[s] * k[s];
    Vector err = Vector::Zero(n);
    for (int s = 0; s < 7; ++s) err += h * (detail::dp_b5[s] - detail::dp_b4[s]) * k[s];
    double scale_err = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double sc = atol + rtol * std::max(std::abs(u(i)), std::abs(u5(i)));
      scale_err += (err(i) / sc) * (err(i) / sc);
    }
    scale_err = std::sqrt(scale_err / static_cast<double>(n));

    if (scale_err <= 1.0) {
      if (sample_dt > 0) {
        // dense output on [t, t+h]
        Vector ydiff = u5 - u;
        Vector bspl = h * k[0] - ydiff;
        Vector r5 = Vector::Zero(n);
        for (int s = 0; s < 7; ++s)
          if (detail::dp_d[s] != 0) r5 += h * detail::dp_d[s] * k[s];
        while (next_sample <= t + h + 1e-12 * span) {
          double th = (next_sample - t) / h;
          Vector y = u + th * (ydiff + (1 - th) * (bspl + th * ((ydiff - h * k[6] - bspl) + (1 - th) * r5)));
          record(next_sample, y, h);
          next_sample += sample_dt;
        }
      }
      t += h;
      u = u5;
      k[0] = k[6];  // FSAL
      if (sample_dt <= 0) record(t, u, h);
    }
    double factor = scale_err > 0 ? 0.9 * std::pow(scale_err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return traj;
}

inline Trajectory rk45(const DynamicalSystem& sys, const Vector& u0, double lambda, double t0,
                       double t1, double rtol = 1e-8, double atol = 1e-10,
                       double sample_dt = 0) {
  return rk45_generic([&](double, const Vector& u) { return sys.residual(u, lambda); }, u0, t0, t1,
                      rtol, atol, sample_dt);
}

struct PeriodEstimate {
  double period;
  double stddev;  // across cycles
  int cycles;
};

/// Mean spacing of upward zero-crossings of the mean-removed component, with
/// linear interpolation between samples. The leading `transient_fraction` of
/// the trajectory is discarded first.
inline PeriodEstimate estimate_period(const Trajectory& traj, int component,
                                      double transient_fraction = 0.5) {
  if (traj.times.size() < 4) throw std::runtime_error("no sustained oscillation");
  double t_start = traj.times.front() +
                   transient_fraction * (traj.times.back() - traj.times.front());
  std::vector<double> t, y;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < t_start) continue;
    t.push_back(traj.times[i]);
    y.push_back(traj.states[i](component));
  }
  if (t.size() < 4) throw std::runtime_error("no sustained oscillation");
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  for (double& v : y) v -= mean;

  std::vector<double> crossings;
  for (size_t i = 1; i < y.size(); ++i) {
    if (y[i - 1] < 0 && y[i] >= 0) {
      double frac = -y[i - 1] / (y[i] - y[i - 1]);
      crossings.push_back(t[i - 1] + frac * (t[i] - t[i - 1]));
    }
  }
  if (crossings.size() < 3) throw std::runtime_error("no sustained oscillation");

  std::vector<double> gaps;
  for (size_t i = 1; i < crossings.size(); ++i) gaps.push_back(crossings[i] - crossings[i - 1]);
  double period = 0;
  for (double g : gaps) period += g;
  period /= static_cast<double>(gaps.size());
  double var = 0;
  for (double g : gaps) var += (g - period) * (g - period);
  var /= static_cast<double>(gaps.size());
  return {period, std::sqrt(var), static_cast<int>(gaps.size())};
}

}  // namespace hopfkit
