#pragma once

#include <functional>
#include <random>

#include "hopfkit/system.hpp"

namespace hopfkit::testutil {

/// F(u, lambda) = (A + lambda I) u: linear system with a spectrum planted via A.
class LinearSystem final : public DynamicalSystem {
 public:
  explicit LinearSystem(Matrix A) : DynamicalSystem(static_cast<int>(A.rows())), A_(std::move(A)) {}

  int dim() const override { return static_cast<int>(A_.rows()); }
  std::string name() const override { return "linear"; }
  std::string lambda_name() const override { return "lambda"; }
  std::vector<std::string> controls() const override { return {}; }
  double control(const std::string& c) const override {
    throw std::invalid_argument("linear: unknown control '" + c + "'");
  }
  SystemPtr with_control(const std::string& c, double) const override {
    throw std::invalid_argument("linear: unknown control '" + c + "'");
  }
  Vector residual(const Vector& u, double lambda) const override { return A_ * u + lambda * u; }
  Matrix jacobian(const Vector&, double lambda) const override {
    Matrix J = A_;
    J.diagonal().array() += lambda;
    return J;
  }
  Vector d_lambda(const Vector& u, double) const override { return u; }
  Matrix hessian_action(const Vector&, double, const Vector&) const override {
    return Matrix::Zero(dim(), dim());
  }
  Vector d_lambda_u_action(const Vector&, double, const Vector& z) const override { return z; }
  Vector d_control(const Vector&, double, const std::string& c) const override {
    throw std::invalid_argument("linear: unknown control '" + c + "'");
  }
  Vector d_control_jac_action(const Vector&, double, const Vector&,
                              const std::string& c) const override {
    throw std::invalid_argument("linear: unknown control '" + c + "'");
  }
  Vector normalization() const override { return Vector::Ones(dim()); }
  std::pair<double, double> default_lambda_range() const override { return {-1.0, 1.0}; }

 private:
  Matrix A_;
};

/// Scalar system from a callable; lambda is ignored. For root-finding tests.
class ScalarSystem final : public DynamicalSystem {
 public:
  ScalarSystem(std::function<double(double)> f, std::function<double(double)> fp)
      : DynamicalSystem(1), f_(std::move(f)), fp_(std::move(fp)) {}

  int dim() const override { return 1; }
  std::string name() const override { return "scalar"; }
  std::string lambda_name() const override { return "lambda"; }
  std::vector<std::string> controls() const override { return {}; }
  double control(const std::string& c) const override {
    throw std::invalid_argument("scalar: unknown control '" + c + "'");
  }
  SystemPtr with_control(const std::string& c, double) const override {
    throw std::invalid_argument("scalar: unknown control '" + c + "'");
  }
  Vector residual(const Vector& u, double) const override {
    Vector r(1);
    r(0) = f_(u(0));
    return r;
  }
  Matrix jacobian(const Vector& u, double) const override {
    Matrix J(1, 1);
    J(0, 0) = fp_(u(0));
    return J;
  }
  Vector d_lambda(const Vector&, double) const override { return Vector::Zero(1); }
  Matrix hessian_action(const Vector&, double, const Vector&) const override {
    throw std::logic_error("scalar: hessian_action not provided");
  }
  Vector d_lambda_u_action(const Vector&, double, const Vector&) const override {
    return Vector::Zero(1);
  }
  Vector d_control(const Vector&, double, const std::string& c) const override {
    throw std::invalid_argument("scalar: unknown control '" + c + "'");
  }
  Vector d_control_jac_action(const Vector&, double, const Vector&,
                              const std::string& c) const override {
    throw std::invalid_argument("scalar: unknown control '" + c + "'");
  }
  Vector normalization() const override { return Vector::Ones(1); }
  std::pair<double, double> default_lambda_range() const override { return {0.0, 1.0}; }

 private:
  std::function<double(double)> f_, fp_;
};

inline Vector random_vector(int n, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace hopfkit::testutil
