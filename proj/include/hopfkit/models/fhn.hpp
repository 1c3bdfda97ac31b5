#pragma once

#include "hopfkit/system.hpp"

namespace hopfkit::models {

/// FitzHugh-Nagumo cell model. Bifurcation parameter: c1; control: c2.
/// Time unit is milliseconds.
struct FhnParams {
  double a = -0.12;
  double b = 0.011;
  double c1 = 0.15;
  double c2 = 0.05;
  double c3 = 0.55;
};

class Fhn final : public DynamicalSystem {
 public:
  explicit Fhn(FhnParams p = {}) : DynamicalSystem(2), p_(p) {}

  int dim() const override { return 2; }
  std::string name() const override { return "fhn"; }
  std::string lambda_name() const override { return "c1"; }
  std::vector<std::string> controls() const override { return {"c2"}; }

  double control(const std::string& cname) const override {
    require_control(cname);
    return p_.c2;
  }
  SystemPtr with_control(const std::string& cname, double value) const override {
    require_control(cname);
    FhnParams q = p_;
    q.c2 = value;
    return std::make_shared<Fhn>(q);
  }

  // cubic nonlinearity g(v) = v(v-a)(1-v)
  double g(double v) const { return v * (v - p_.a) * (1 - v); }
  double gp(double v) const { return -3 * v * v + 2 * (1 + p_.a) * v - p_.a; }
  double gpp(double v) const { return -6 * v + 2 * (1 + p_.a); }

  Vector residual(const Vector& u, double c1) const override {
    Vector f(2);
    f(0) = c1 * g(u(0)) - p_.c2 * u(1);
    f(1) = p_.b * (u(0) - p_.c3 * u(1));
    return f;
  }
  Matrix jacobian(const Vector& u, double c1) const override {
    Matrix J(2, 2);
    J << c1 * gp(u(0)), -p_.c2, p_.b, -p_.b * p_.c3;
    return J;
  }
  Vector d_lambda(const Vector& u, double) const override {
    Vector f(2);
    f << g(u(0)), 0.0;
    return f;
  }
  Matrix hessian_action(const Vector& u, double c1, const Vector& z) const override {
    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = c1 * gpp(u(0)) * z(0);
    return M;
  }
  Vector d_lambda_u_action(const Vector& u, double, const Vector& z) const override {
    Vector f(2);
    f << gp(u(0)) * z(0), 0.0;
    return f;
  }
  Vector d_control(const Vector& u, double, const std::string& cname) const override {
    require_control(cname);
    Vector f(2);
    f << -u(1), 0.0;
    return f;
  }
  Vector d_control_jac_action(const Vector&, double, const Vector& z,
                              const std::string& cname) const override {
    require_control(cname);
    Vector f(2);
    f << -z(1), 0.0;
    return f;
  }

  Vector normalization() const override {
    Vector c(2);
    c << 0.0, 1.0;
    return c;
  }
  std::pair<double, double> default_lambda_range() const override { return {0.03, 0.07}; }

  const FhnParams& params() const { return p_; }

  /// Analytic Hopf of the origin: trace of F_u vanishes at c1 = b c3 / (-a).
  double hopf_c1() const { return p_.b * p_.c3 / (-p_.a); }
  double hopf_mu() const {
    return std::sqrt(p_.c2 * p_.b - (p_.b * p_.c3) * (p_.b * p_.c3));
  }

 private:
  static void require_control(const std::string& cname) {
    if (cname != "c2") throw std::invalid_argument("fhn: unknown control '" + cname + "'");
  }
  FhnParams p_;
};

}  // namespace hopfkit::models
