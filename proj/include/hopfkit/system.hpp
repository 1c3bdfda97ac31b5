#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopfkit/linalg.hpp"

namespace hopfkit {

/// A parameterized dynamical system du/dt = F(u, lambda) with named scalar
/// controls and analytic first/second derivatives. Instances are immutable;
/// control updates clone the system.
class DynamicalSystem {
 public:
  virtual ~DynamicalSystem() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual std::string lambda_name() const = 0;

  virtual std::vector<std::string> controls() const = 0;
  virtual double control(const std::string& name) const = 0;
  virtual std::shared_ptr<const DynamicalSystem> with_control(const std::string& name,
                                                              double value) const = 0;

  virtual Vector residual(const Vector& u, double lambda) const = 0;
  virtual Matrix jacobian(const Vector& u, double lambda) const = 0;
  virtual Vector d_lambda(const Vector& u, double lambda) const = 0;
  /// Second derivative as the u-derivative of the Jacobian-vector product:
  /// returns M = d/du [F_u(u,lambda) z], so M*y = d/deps F_u(u+eps*y,lambda) z at eps=0.
  virtual Matrix hessian_action(const Vector& u, double lambda, const Vector& z) const = 0;
  virtual Vector d_lambda_u_action(const Vector& u, double lambda, const Vector& z) const = 0;
  virtual Vector d_control(const Vector& u, double lambda, const std::string& name) const = 0;
  virtual Vector d_control_jac_action(const Vector& u, double lambda, const Vector& z,
                                      const std::string& name) const = 0;

  /// Quadrature weights of the discrete inner product (ones for ODE models).
  const Vector& quadrature_weights() const { return weights_; }
  double inner(const Vector& x, const Vector& y) const {
    return x.dot(weights_.cwiseProduct(y));
  }
  double norm(const Vector& x) const { return std::sqrt(inner(x, x)); }

  /// Model's default normalization function c for the extended system.
  virtual Vector normalization() const = 0;

  /// Defaults used by the front end.
  virtual Vector initial_state() const { return Vector::Zero(dim()); }
  virtual std::pair<double, double> default_lambda_range() const = 0;

 protected:
  void set_quadrature_weights(Vector w) { weights_ = std::move(w); }
  explicit DynamicalSystem(int n) : weights_(Vector::Ones(n)) {}

 private:
  Vector weights_;
};

using SystemPtr = std::shared_ptr<const DynamicalSystem>;

/// Max relative discrepancy of each analytic derivative against central
/// finite differences; key "control:<name>" for control derivatives.
struct FdReport {
  std::map<std::string, double> errors;
  double max_error() const {
    double m = 0;
    for (const auto& [k, v] : errors) m = std::max(m, v);
    return m;
  }
};

namespace detail {

inline double rel_diff(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff());
}

inline void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw std::runtime_error("fd_validate: non-finite " + what);
}

}  // namespace detail

inline FdReport fd_validate(const DynamicalSystem& sys, const Vector& u, double lambda,
                            double step, unsigned seed = 0) {
  if (step <= 0) throw std::invalid_argument("fd_validate: step must be positive");
  const int n = sys.dim();
  FdReport rep;
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Vector z(n);
  for (int i = 0; i < n; ++i) z(i) = gauss(rng);
  z.normalize();

  // F_u against directional differences of the residual
  {
    const Matrix J = sys.jacobian(u, lambda);
    double err = 0;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d(i) = gauss(rng);
      d.normalize();
      Vector fp = sys.residual(u + step * d, lambda);
      Vector fm = sys.residual(u - step * d, lambda);
      detail::require_finite(fp, "residual (F_u check)");
      detail::require_finite(fm, "residual (F_u check)");
      Vector fd = (fp - fm) / (2 * step);
      err = std::max(err, detail::rel_diff(J * d, fd));
    }
    rep.errors["F_u"] = err;
  }
  // F_lambda
  {
    Vector fp = sys.residual(u, lambda + step);
    Vector fm = sys.residual(u, lambda - step);
    detail::require_finite(fp, "residual (F_lambda check)");
    detail::require_finite(fm, "residual (F_lambda check)");
    rep.errors["F_lambda"] = detail::rel_diff(sys.d_lambda(u, lambda), (fp - fm) / (2 * step));
  }
  // F_uu action against differences of the Jacobian-vector product
  {
    const Matrix H = sys.hessian_action(u, lambda, z);
    double err = 0;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d(i) = gauss(rng);
      d.normalize();
      Vector fd = (sys.jacobian(u + step * d, lambda) * z - sys.jacobian(u - step * d, lambda) * z) /
                  (2 * step);
      err = std::max(err, detail::rel_diff(H * d, fd));
    }
    rep.errors["F_uu"] = err;
  }
  // F_ulambda action
  {
    Vector fd = (sys.jacobian(u, lambda + step) * z - sys.jacobian(u, lambda - step) * z) /
                (2 * step);
    rep.errors["F_ulambda"] = detail::rel_diff(sys.d_lambda_u_action(u, lambda, z), fd);
  }
  // control derivatives
  for (const auto& cname : sys.controls()) {
    double theta = sys.control(cname);
    double h = step * (1.0 + std::abs(theta));
    auto plus = sys.with_control(cname, theta + h);
    auto minus = sys.with_control(cname, theta - h);
    Vector fp = plus->residual(u, lambda);
    Vector fm = minus->residual(u, lambda);
    detail::require_finite(fp, "residual (control check)");
    detail::require_finite(fm, "residual (control check)");
    rep.errors["control:" + cname] =
        detail::rel_diff(sys.d_control(u, lambda, cname), (fp - fm) / (2 * h));
    Vector jfd = (plus->jacobian(u, lambda) * z - minus->jacobian(u, lambda) * z) / (2 * h);
    rep.errors["control_jac:" + cname] =
        detail::rel_diff(sys.d_control_jac_action(u, lambda, z, cname), jfd);
  }
  return rep;
}

/// Central-difference step balancing truncation and roundoff.
inline double fd_step(const Vector& u) {
  return std::max(1e-6, 1e-7 * (1.0 + u.cwiseAbs().maxCoeff()));
}

}  // namespace hopfkit
