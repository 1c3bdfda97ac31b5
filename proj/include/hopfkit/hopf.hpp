#pragma once

#include <cmath>

#include "json.hpp"

#include "hopfkit/linalg.hpp"
#include "hopfkit/stability.hpp"
#include "hopfkit/system.hpp"

namespace hopfkit {

/// Unknowns of the extended Hopf system, flattened as (u, v, w, lambda, mu).
struct GRState {
  Vector u, v, w;
  double lambda = 0;
  double mu = 0;

  int dim() const { return static_cast<int>(u.size()); }

  Vector flatten() const {
    const int n = dim();
    Vector x(3 * n + 2);
    x.segment(0, n) = u;
    x.segment(n, n) = v;
    x.segment(2 * n, n) = w;
    x(3 * n) = lambda;
    x(3 * n + 1) = mu;
    return x;
  }
  static GRState unflatten(const Vector& x, int n) {
    GRState s;
    s.u = x.segment(0, n);
    s.v = x.segment(n, n);
    s.w = x.segment(2 * n, n);
    s.lambda = x(3 * n);
    s.mu = x(3 * n + 1);
    return s;
  }
};

struct NormalizationError : std::runtime_error {
  NormalizationError() : std::runtime_error("normalization function orthogonal to eigenfunction") {}
};

/// Rotate and scale the eigenpair (v0, w0) so that <c,v> = 0 and <c,w> = 1.
inline std::pair<Vector, Vector> normalize_eigenpair(const DynamicalSystem& sys, const Vector& v0,
                                                     const Vector& w0, const Vector& c) {
  double cv = sys.inner(c, v0);
  double cw = sys.inner(c, w0);
  if (cv * cv + cw * cw <= 1e-12) throw NormalizationError();
  double theta = std::atan2(cv, cw);
  double s = cv * std::sin(theta) + cw * std::cos(theta);
  if (s < 0) {
    theta += M_PI;
    s = -s;
  }
  if (std::abs(s) < 1e-12) throw NormalizationError();
  double r = 1.0 / s;
  Vector v = r * (v0 * std::cos(theta) - w0 * std::sin(theta));
  Vector w = r * (v0 * std::sin(theta) + w0 * std::cos(theta));
  return {std::move(v), std::move(w)};
}

/// Residual of the extended system:
/// (F; F_u v + mu w; F_u w - mu v; <c,v>; <c,w> - 1).
inline Vector gr_residual(const DynamicalSystem& sys, const GRState& X, const Vector& c) {
  const int n = X.dim();
  if (sys.dim() != n || c.size() != n) throw std::invalid_argument("gr_residual: dimension mismatch");
  Matrix J = sys.jacobian(X.u, X.lambda);
  Vector R(3 * n + 2);
  R.segment(0, n) = sys.residual(X.u, X.lambda);
  R.segment(n, n) = J * X.v + X.mu * X.w;
  R.segment(2 * n, n) = J * X.w - X.mu * X.v;
  R(3 * n) = sys.inner(c, X.v);
  R(3 * n + 1) = sys.inner(c, X.w) - 1.0;
  if (!R.allFinite()) throw std::runtime_error("gr_residual: non-finite model output");
  return R;
}

/// Jacobian of gr_residual in the flattened unknowns.
inline Matrix gr_jacobian(const DynamicalSystem& sys, const GRState& X, const Vector& c) {
  const int n = X.dim();
  Matrix J = sys.jacobian(X.u, X.lambda);
  Matrix G = Matrix::Zero(3 * n + 2, 3 * n + 2);

  G.block(0, 0, n, n) = J;
  G.block(0, 3 * n, n, 1) = sys.d_lambda(X.u, X.lambda);

  G.block(n, 0, n, n) = sys.hessian_action(X.u, X.lambda, X.v);
  G.block(n, n, n, n) = J;
  G.block(n, 2 * n, n, n).diagonal().setConstant(X.mu);
  G.block(n, 3 * n, n, 1) = sys.d_lambda_u_action(X.u, X.lambda, X.v);
  G.block(n, 3 * n + 1, n, 1) = X.w;

  G.block(2 * n, 0, n, n) = sys.hessian_action(X.u, X.lambda, X.w);
  G.block(2 * n, n, n, n).diagonal().setConstant(-X.mu);
  G.block(2 * n, 2 * n, n, n) = J;
  G.block(2 * n, 3 * n, n, 1) = sys.d_lambda_u_action(X.u, X.lambda, X.w);
  G.block(2 * n, 3 * n + 1, n, 1) = -X.v;

  Vector crow = sys.quadrature_weights().cwiseProduct(c);
  G.block(3 * n, n, 1, n) = crow.transpose();
  G.block(3 * n + 1, 2 * n, 1, n) = crow.transpose();
  return G;
}

struct HopfPoint {
  GRState state;
  double residual_norm = 0;
  double eig_gap = 0;  // |i mu - nearest eigenvalue of F_u|

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["lambda"] = state.lambda;
    j["mu"] = state.mu;
    j["period"] = 2 * M_PI / state.mu;
    j["residual"] = residual_norm;
    j["eig_gap"] = eig_gap;
    j["u"] = std::vector<double>(state.u.begin(), state.u.end());
    j["v"] = std::vector<double>(state.v.begin(), state.v.end());
    j["w"] = std::vector<double>(state.w.begin(), state.w.end());
    return j;
  }
};

struct HopfSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Damped Newton on the extended system from a stability-analysis guess.
/// The eigenpair is normalized against c before the iteration; the converged
/// point is verified by one shifted eigensolve of F_u.
inline HopfPoint solve_hopf(const DynamicalSystem& sys, const HopfGuess& guess, const Vector& c,
                            double tol = 1e-10, int maxit = 50) {
  const int n = sys.dim();
  GRState X;
  X.u = guess.u;
  X.lambda = guess.lambda;
  X.mu = guess.mu;
  std::tie(X.v, X.w) = normalize_eigenpair(sys, guess.v0, guess.w0, c);

  Vector R = gr_residual(sys, X, c);
  double nr = R.norm();
  bool reflected = false;
  int it = 0;
  for (; it < maxit && nr > tol; ++it) {
    Matrix G = gr_jacobian(sys, X, c);
    double gscale = G.cwiseAbs().maxCoeff();
    Eigen::PartialPivLU<Eigen::Ref<Matrix>> lu(G);  // factors in place
    if (linalg::detail::singular_pivot(lu, gscale) >= 0)
      throw HopfSolveError("solve_hopf: non-regular Hopf point (singular extended Jacobian)");
    Vector step = lu.solve(Vector(-R));

    Vector x = X.flatten();
    double alpha = 1.0;
    GRState X_try;
    Vector R_try;
    double nr_try;
    while (true) {
      X_try = GRState::unflatten(x + alpha * step, n);
      R_try = gr_residual(sys, X_try, c);
      nr_try = R_try.norm();
      if (nr_try < nr || alpha <= 1e-4) break;
      alpha *= 0.5;
    }
    X = X_try;
    R = R_try;
    nr = nr_try;
    if (X.mu <= 0) {
      if (reflected) throw HopfSolveError("solve_hopf: frequency sign flip recurred");
      reflected = true;
      X.mu = std::abs(X.mu);
      R = gr_residual(sys, X, c);
      nr = R.norm();
    }
  }
  if (nr > tol)
    throw HopfSolveError("solve_hopf: max iterations exceeded (residual " + std::to_string(nr) +
                         ")");

  HopfPoint hp;
  hp.state = X;
  hp.residual_norm = nr;
  auto near = linalg::eig_near_shift(sys.jacobian(X.u, X.lambda), Complex(0, X.mu), 1);
  hp.eig_gap = std::abs(Complex(0, X.mu) - near.front().value);
  if (hp.eig_gap > 1e-6 * (1.0 + X.mu))
    throw HopfSolveError("solve_hopf: converged point failed eigenvalue verification (gap " +
                         std::to_string(hp.eig_gap) + ")");
  return hp;
}

}  // namespace hopfkit
