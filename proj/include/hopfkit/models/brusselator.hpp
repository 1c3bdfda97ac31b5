#pragma once

#include "hopfkit/system.hpp"

namespace hopfkit::models {

/// Brusselator reaction kinetics. Bifurcation parameter: b; control: a.
/// Closed-form fixed point (a, b/a) with a Hopf at b = 1 + a^2, mu = a.
struct BrusselatorParams {
  double a = 1.0;
  double b = 2.0;
};

class Brusselator final : public DynamicalSystem {
 public:
  explicit Brusselator(BrusselatorParams p = {}) : DynamicalSystem(2), p_(p) {
    if (p_.a <= 0) throw std::invalid_argument("brusselator: a must be positive");
  }

  int dim() const override { return 2; }
  std::string name() const override { return "brusselator"; }
  std::string lambda_name() const override { return "b"; }
  std::vector<std::string> controls() const override { return {"a"}; }

  double control(const std::string& cname) const override {
    require_control(cname);
    return p_.a;
  }
  SystemPtr with_control(const std::string& cname, double value) const override {
    require_control(cname);
    BrusselatorParams q = p_;
    q.a = value;
    return std::make_shared<Brusselator>(q);
  }

  Vector residual(const Vector& u, double b) const override {
    Vector f(2);
    f(0) = p_.a - (b + 1) * u(0) + u(0) * u(0) * u(1);
    f(1) = b * u(0) - u(0) * u(0) * u(1);
    return f;
  }
  Matrix jacobian(const Vector& u, double b) const override {
    Matrix J(2, 2);
    J << -(b + 1) + 2 * u(0) * u(1), u(0) * u(0), b - 2 * u(0) * u(1), -u(0) * u(0);
    return J;
  }
  Vector d_lambda(const Vector& u, double) const override {
    Vector f(2);
    f << -u(0), u(0);
    return f;
  }
  Matrix hessian_action(const Vector& u, double, const Vector& z) const override {
    Matrix M(2, 2);
    M << 2 * u(1) * z(0) + 2 * u(0) * z(1), 2 * u(0) * z(0),
        -2 * u(1) * z(0) - 2 * u(0) * z(1), -2 * u(0) * z(0);
    return M;
  }
  Vector d_lambda_u_action(const Vector&, double, const Vector& z) const override {
    Vector f(2);
    f << -z(0), z(0);
    return f;
  }
  Vector d_control(const Vector&, double, const std::string& cname) const override {
    require_control(cname);
    Vector f(2);
    f << 1.0, 0.0;
    return f;
  }
  Vector d_control_jac_action(const Vector&, double, const Vector&,
                              const std::string& cname) const override {
    require_control(cname);
    return Vector::Zero(2);
  }

  Vector normalization() const override {
    Vector c(2);
    c << 0.0, 1.0;
    return c;
  }
  Vector initial_state() const override {
    Vector u(2);
    u << p_.a, p_.b / p_.a;
    return u;
  }
  std::pair<double, double> default_lambda_range() const override { return {1.5, 2.5}; }

  const BrusselatorParams& params() const { return p_; }

 private:
  static void require_control(const std::string& cname) {
    if (cname != "a") throw std::invalid_argument("brusselator: unknown control '" + cname + "'");
  }
  BrusselatorParams p_;
};

}  // namespace hopfkit::models
