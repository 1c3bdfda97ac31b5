#pragma once

#include <Eigen/SparseCore>

#include "hopfkit/system.hpp"

namespace hopfkit::models {

/// Complex Ginzburg-Landau equation with cubic-quintic nonlinearity, decoupled
/// into two real components and discretized by finite differences with
/// homogeneous Dirichlet boundary conditions (interior unknowns only).
/// Bifurcation parameter: r. State layout: (u1 at all nodes, u2 at all nodes).
struct CglParams {
  double mu = 0.1;   // imaginary cubic coefficient of the PDE (not the Hopf frequency)
  double nu = 1.0;
  double c3 = -1.0;
  double c5 = 1.0;
  int nx = 32;       // interior points (2D: nx x ny; 1D: nx)
  int ny = 16;
  double l1 = 1.0;   // 2D half-lengths in units of pi
  double l2 = 0.5;
  double l = 1.0;    // 1D half-length in units of pi (control)
};

namespace detail {

// Pointwise cubic-quintic term N(u1,u2) and its first/second derivatives.
//   N1 = -q (c3 u1 - m u2) - c5 q^2 u1,  N2 = -q (m u1 + c3 u2) - c5 q^2 u2,
// with q = u1^2 + u2^2.
struct CglNonlinearity {
  double m, c3, c5;

  void value(double u1, double u2, double& n1, double& n2) const {
    double q = u1 * u1 + u2 * u2;
    n1 = -q * (c3 * u1 - m * u2) - c5 * q * q * u1;
    n2 = -q * (m * u1 + c3 * u2) - c5 * q * q * u2;
  }
  // 2x2 Jacobian block at one node
  void jac(double u1, double u2, double J[2][2]) const {
    double q = u1 * u1 + u2 * u2;
    double p1 = c3 * u1 - m * u2;
    double p2 = m * u1 + c3 * u2;
    J[0][0] = -2 * u1 * p1 - q * c3 - c5 * (4 * q * u1 * u1 + q * q);
    J[0][1] = -2 * u2 * p1 + q * m - 4 * c5 * q * u1 * u2;
    J[1][0] = -2 * u1 * p2 - q * m - 4 * c5 * q * u1 * u2;
    J[1][1] = -2 * u2 * p2 - q * c3 - c5 * (4 * q * u2 * u2 + q * q);
  }
  // Rows of the directional second derivative: M[a][b] = (Hess(N_a) z)_b
  void hess_action(double u1, double u2, double z1, double z2, double M[2][2]) const {
    double hqu1[2][2] = {{6 * u1, 2 * u2}, {2 * u2, 2 * u1}};
    double hqu2[2][2] = {{2 * u2, 2 * u1}, {2 * u1, 6 * u2}};
    double hq2u1[2][2] = {
        {20 * u1 * u1 * u1 + 12 * u1 * u2 * u2, 12 * u1 * u1 * u2 + 4 * u2 * u2 * u2},
        {12 * u1 * u1 * u2 + 4 * u2 * u2 * u2, 4 * u1 * u1 * u1 + 12 * u1 * u2 * u2}};
    double hq2u2[2][2] = {
        {4 * u2 * u2 * u2 + 12 * u2 * u1 * u1, 12 * u2 * u2 * u1 + 4 * u1 * u1 * u1},
        {12 * u2 * u2 * u1 + 4 * u1 * u1 * u1, 20 * u2 * u2 * u2 + 12 * u2 * u1 * u1}};
    for (int b = 0; b < 2; ++b)
      M[0][b] = (-c3 * hqu1[0][b] + m * hqu2[0][b] - c5 * hq2u1[0][b]) * z1 +
                (-c3 * hqu1[1][b] + m * hqu2[1][b] - c5 * hq2u1[1][b]) * z2;
    // row for N2
    for (int b = 0; b < 2; ++b)
      M[1][b] = (-m * hqu1[0][b] - c3 * hqu2[0][b] - c5 * hq2u2[0][b]) * z1 +
                (-m * hqu1[1][b] - c3 * hqu2[1][b] - c5 * hq2u2[1][b]) * z2;
  }
};

// Lumped trapezoidal weights on an interval of length len with n interior
// points: boundary half-cells are assigned to the adjacent interior node, so
// the weights sum to len exactly.
inline Vector interval_weights(double len, int n) {
  double h = len / (n + 1);
  Vector w = Vector::Constant(n, h);
  w(0) = 1.5 * h;
  w(n - 1) = 1.5 * h;
  return w;
}

}  // namespace detail

class CglBase : public DynamicalSystem {
 public:
  int dim() const override { return 2 * ng_; }

  Vector residual(const Vector& u, double r) const override {
    const int ng = ng_;
    Vector f(2 * ng);
    auto u1 = u.head(ng);
    auto u2 = u.tail(ng);
    f.head(ng) = lap_ * u1 + r * u1 - p_.nu * u2;
    f.tail(ng) = lap_ * u2 + p_.nu * u1 + r * u2;
    detail::CglNonlinearity nl{p_.mu, p_.c3, p_.c5};
    for (int i = 0; i < ng; ++i) {
      double n1, n2;
      nl.value(u1(i), u2(i), n1, n2);
      f(i) += n1;
      f(ng + i) += n2;
    }
    return f;
  }

  Matrix jacobian(const Vector& u, double r) const override {
    const int ng = ng_;
    Matrix J = Matrix::Zero(2 * ng, 2 * ng);
    J.topLeftCorner(ng, ng) = lap_dense_;
    J.bottomRightCorner(ng, ng) = lap_dense_;
    J.topLeftCorner(ng, ng).diagonal().array() += r;
    J.bottomRightCorner(ng, ng).diagonal().array() += r;
    J.topRightCorner(ng, ng).diagonal().array() -= p_.nu;
    J.bottomLeftCorner(ng, ng).diagonal().array() += p_.nu;
    detail::CglNonlinearity nl{p_.mu, p_.c3, p_.c5};
    for (int i = 0; i < ng; ++i) {
      double B[2][2];
      nl.jac(u(i), u(ng + i), B);
      J(i, i) += B[0][0];
      J(i, ng + i) += B[0][1];
      J(ng + i, i) += B[1][0];
      J(ng + i, ng + i) += B[1][1];
    }
    return J;
  }

  Vector d_lambda(const Vector& u, double) const override { return u; }

  Matrix hessian_action(const Vector& u, double, const Vector& z) const override {
    const int ng = ng_;
    Matrix M = Matrix::Zero(2 * ng, 2 * ng);
    detail::CglNonlinearity nl{p_.mu, p_.c3, p_.c5};
    for (int i = 0; i < ng; ++i) {
      double B[2][2];
      nl.hess_action(u(i), u(ng + i), z(i), z(ng + i), B);
      M(i, i) = B[0][0];
      M(i, ng + i) = B[0][1];
      M(ng + i, i) = B[1][0];
      M(ng + i, ng + i) = B[1][1];
    }
    return M;
  }

  Vector d_lambda_u_action(const Vector&, double, const Vector& z) const override { return z; }

  std::pair<double, double> default_lambda_range() const override { return {1.5, 2.5}; }

  const CglParams& params() const { return p_; }
  int grid_points() const { return ng_; }
  const Eigen::SparseMatrix<double>& laplacian() const { return lap_; }

 protected:
  CglBase(const CglParams& p, int ng) : DynamicalSystem(2 * ng), p_(p), ng_(ng) {}

  Vector rotation_d_nu(const Vector& u) const {
    Vector f(2 * ng_);
    f.head(ng_) = -u.tail(ng_);
    f.tail(ng_) = u.head(ng_);
    return f;
  }

  CglParams p_;
  int ng_;
  Eigen::SparseMatrix<double> lap_;
  Matrix lap_dense_;
};

/// 2D model on [-l1 pi, l1 pi] x [-l2 pi, l2 pi]; control: nu.
class Cgl2d final : public CglBase {
 public:
  explicit Cgl2d(CglParams p = {}) : CglBase(p, p.nx * p.ny) {
    if (p.nx < 4 || p.ny < 4) throw std::invalid_argument("cgl2d: grid sizes must be >= 4");
    const int nx = p.nx, ny = p.ny, ng = ng_;
    hx_ = 2 * M_PI * p.l1 / (nx + 1);
    hy_ = 2 * M_PI * p.l2 / (ny + 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(5 * ng));
    auto idx = [nx](int i, int j) { return i + nx * j; };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        trip.emplace_back(idx(i, j), idx(i, j), -2.0 / (hx_ * hx_) - 2.0 / (hy_ * hy_));
        if (i > 0) trip.emplace_back(idx(i, j), idx(i - 1, j), 1.0 / (hx_ * hx_));
        if (i < nx - 1) trip.emplace_back(idx(i, j), idx(i + 1, j), 1.0 / (hx_ * hx_));
        if (j > 0) trip.emplace_back(idx(i, j), idx(i, j - 1), 1.0 / (hy_ * hy_));
        if (j < ny - 1) trip.emplace_back(idx(i, j), idx(i, j + 1), 1.0 / (hy_ * hy_));
      }
    lap_.resize(ng, ng);
    lap_.setFromTriplets(trip.begin(), trip.end());
    lap_dense_ = Matrix(lap_);

    Vector wx = detail::interval_weights(2 * M_PI * p.l1, nx);
    Vector wy = detail::interval_weights(2 * M_PI * p.l2, ny);
    Vector w(2 * ng);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        w(idx(i, j)) = wx(i) * wy(j);
        w(ng + idx(i, j)) = wx(i) * wy(j);
      }
    set_quadrature_weights(std::move(w));
  }

  std::string name() const override { return "cgl2d"; }
  std::string lambda_name() const override { return "r"; }
  std::vector<std::string> controls() const override { return {"nu"}; }

  double control(const std::string& cname) const override {
    require_control(cname);
    return p_.nu;
  }
  SystemPtr with_control(const std::string& cname, double value) const override {
    require_control(cname);
    CglParams q = p_;
    q.nu = value;
    return std::make_shared<Cgl2d>(q);
  }

  Vector d_control(const Vector& u, double, const std::string& cname) const override {
    require_control(cname);
    return rotation_d_nu(u);
  }
  Vector d_control_jac_action(const Vector&, double, const Vector& z,
                              const std::string& cname) const override {
    require_control(cname);
    return rotation_d_nu(z);
  }

  /// Quadratic pair breaking the x- and y-antisymmetries of the eigenmodes.
  Vector normalization() const override {
    const int nx = p_.nx, ny = p_.ny, ng = ng_;
    Vector c(2 * ng);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double x = -M_PI * p_.l1 + (i + 1) * hx_;
        double y = -M_PI * p_.l2 + (j + 1) * hy_;
        double val = (x + M_PI / 2) * (x + M_PI / 2) + (y + M_PI) * (y + M_PI);
        c(i + nx * j) = val;
        c(ng + i + nx * j) = -val;
      }
    return c;
  }

  /// Discrete Laplacian eigenvalue for mode (kx, ky); Hopf of the trivial
  /// branch sits at r equal to this value.
  double laplacian_eigenvalue(int kx, int ky) const {
    double sx = std::sin(kx * M_PI / (2.0 * (p_.nx + 1)));
    double sy = std::sin(ky * M_PI / (2.0 * (p_.ny + 1)));
    return 4.0 / (hx_ * hx_) * sx * sx + 4.0 / (hy_ * hy_) * sy * sy;
  }

  double hx() const { return hx_; }
  double hy() const { return hy_; }

 private:
  static void require_control(const std::string& cname) {
    if (cname != "nu") throw std::invalid_argument("cgl2d: unknown control '" + cname + "'");
  }
  double hx_, hy_;
};

/// 1D model on [-l pi, l pi]; controls: nu and the half-length l. The grid is
/// fixed on a reference interval, so the Laplacian carries an explicit 1/l^2.
class Cgl1d final : public CglBase {
 public:
  explicit Cgl1d(CglParams p = {}) : CglBase(p, p.nx) {
    if (p.nx < 4) throw std::invalid_argument("cgl1d: n must be >= 4");
    if (p.l <= 0) throw std::invalid_argument("cgl1d: l must be positive");
    const int n = p.nx;
    href_ = 2 * M_PI / (n + 1);  // reference grid at l = 1
    std::vector<Eigen::Triplet<double>> trip;
    double scale = 1.0 / (p.l * p.l * href_ * href_);
    for (int i = 0; i < n; ++i) {
      trip.emplace_back(i, i, -2.0 * scale);
      if (i > 0) trip.emplace_back(i, i - 1, scale);
      if (i < n - 1) trip.emplace_back(i, i + 1, scale);
    }
    lap_.resize(n, n);
    lap_.setFromTriplets(trip.begin(), trip.end());
    lap_dense_ = Matrix(lap_);

    Vector wx = detail::interval_weights(2 * M_PI * p.l, n);
    Vector w(2 * n);
    w << wx, wx;
    set_quadrature_weights(std::move(w));
  }

  std::string name() const override { return "cgl1d"; }
  std::string lambda_name() const override { return "r"; }
  std::vector<std::string> controls() const override { return {"nu", "l"}; }

  double control(const std::string& cname) const override {
    require_control(cname);
    return cname == "nu" ? p_.nu : p_.l;
  }
  SystemPtr with_control(const std::string& cname, double value) const override {
    require_control(cname);
    CglParams q = p_;
    if (cname == "nu")
      q.nu = value;
    else
      q.l = value;
    return std::make_shared<Cgl1d>(q);
  }

  Vector d_control(const Vector& u, double, const std::string& cname) const override {
    require_control(cname);
    if (cname == "nu") return rotation_d_nu(u);
    return laplacian_l_derivative(u);
  }
  Vector d_control_jac_action(const Vector&, double, const Vector& z,
                              const std::string& cname) const override {
    require_control(cname);
    if (cname == "nu") return rotation_d_nu(z);
    return laplacian_l_derivative(z);
  }

  Vector normalization() const override {
    const int n = p_.nx, ng = ng_;
    Vector c(2 * n);
    for (int i = 0; i < n; ++i) {
      double x = p_.l * (-M_PI + (i + 1) * href_);
      c(i) = x + 2 * p_.l;
      c(ng + i) = -(x + 2 * p_.l);
    }
    return c;
  }
  std::pair<double, double> default_lambda_range() const override { return {0.1, 0.5}; }

  double laplacian_eigenvalue(int k) const {
    double s = std::sin(k * M_PI / (2.0 * (p_.nx + 1)));
    return 4.0 / (p_.l * p_.l * href_ * href_) * s * s;
  }

 private:
  // d/dl of (1/l^2) Lap_ref acting on both components: -(2/l) Lap u
  Vector laplacian_l_derivative(const Vector& u) const {
    Vector f(2 * ng_);
    f.head(ng_) = -(2.0 / p_.l) * (lap_ * u.head(ng_));
    f.tail(ng_) = -(2.0 / p_.l) * (lap_ * u.tail(ng_));
    return f;
  }
  static void require_control(const std::string& cname) {
    if (cname != "nu" && cname != "l")
      throw std::invalid_argument("cgl1d: unknown control '" + cname + "'");
  }
  double href_;
};

}  // namespace hopfkit::models
