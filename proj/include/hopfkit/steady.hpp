#pragma once

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "hopfkit/io.hpp"
#include "hopfkit/linalg.hpp"
#include "hopfkit/system.hpp"

namespace hopfkit {

struct NewtonError : std::runtime_error {
  double residual;
  NewtonError(const std::string& msg, double res)
      : std::runtime_error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

/// Damped Newton for F(u, lambda) = 0; backtracking halving with floor 1e-4.
inline Vector newton_steady(const DynamicalSystem& sys, const Vector& u0, double lambda,
                            double tol = 1e-10, int maxit = 50) {
  if (tol <= 0) throw std::invalid_argument("newton_steady: tol must be positive");
  Vector u = u0;
  Vector f = sys.residual(u, lambda);
  double nf = f.norm();
  for (int it = 0; it < maxit; ++it) {
    if (nf <= tol) return u;
    Vector step = linalg::lu_solve(sys.jacobian(u, lambda), Vector(-f));
    double alpha = 1.0;
    Vector u_try, f_try;
    double nf_try;
    while (true) {
      u_try = u + alpha * step;
      f_try = sys.residual(u_try, lambda);
      nf_try = f_try.norm();
      if (nf_try < nf || alpha <= 1e-4) break;
      alpha *= 0.5;
    }
    u = u_try;
    f = f_try;
    nf = nf_try;
  }
  if (nf <= tol) return u;
  throw NewtonError("newton_steady: max iterations exceeded", nf);
}

struct TraceRecord {
  double lambda;
  Vector u;
  std::vector<Complex> eigs;  // leading eigenvalues of F_u, nearest the origin
  double max_growth;          // max Re over the recorded eigenvalues
};

struct ContinuationTrace {
  std::vector<TraceRecord> records;
  bool truncated = false;
  std::string failure;

  /// Columns: lambda, norm_u, re_eig_1, im_eig_1, ...
  void write_csv(std::ostream& os) const {
    size_t k = 0;
    for (const auto& r : records) k = std::max(k, r.eigs.size());
    os << "lambda,norm_u";
    for (size_t i = 1; i <= k; ++i) os << ",re_eig_" << i << ",im_eig_" << i;
    os << "\n";
    for (const auto& r : records) {
      os << io::fmt(r.lambda) << "," << io::fmt(r.u.norm());
      for (size_t i = 0; i < k; ++i) {
        if (i < r.eigs.size())
          os << "," << io::fmt(r.eigs[i].real()) << "," << io::fmt(r.eigs[i].imag());
        else
          os << ",,";
      }
      os << "\n";
    }
  }
};

/// Natural-parameter continuation on a uniform lambda grid, warm-starting
/// Newton from the previous point and recording the eigenvalues of F_u
/// nearest the origin.
inline ContinuationTrace continue_branch(const DynamicalSystem& sys, const Vector& u0,
                                         double lambda_start, double lambda_end, int steps,
                                         int k_eigs = 6, double tol = 1e-10) {
  if (steps < 2) throw std::invalid_argument("continue_branch: steps must be >= 2");
  ContinuationTrace trace;
  Vector u = u0;
  for (int s = 0; s < steps; ++s) {
    double lambda = lambda_start + (lambda_end - lambda_start) * s / (steps - 1);
    try {
      u = newton_steady(sys, u, lambda, tol);
    } catch (const std::exception& e) {
      trace.truncated = true;
      trace.failure = e.what();
      return trace;
    }
    TraceRecord rec;
    rec.lambda = lambda;
    rec.u = u;
    auto pairs = linalg::eig_near_shift(sys.jacobian(u, lambda), Complex(0, 0), k_eigs);
    rec.max_growth = -std::numeric_limits<double>::infinity();
    for (const auto& p : pairs) {
      rec.eigs.push_back(p.value);
      rec.max_growth = std::max(rec.max_growth, p.value.real());
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

/// Newton on the deflated residual M(u) F(u, lambda) with the shifted
/// deflation factor M(u) = prod_i (1 + 1/<u-u_i, u-u_i>), steering the
/// iteration away from the known solutions.
inline Vector deflated_solve(const DynamicalSystem& sys, const std::vector<Vector>& known,
                             const Vector& u0, double lambda, double tol = 1e-10,
                             int maxit = 100) {
  constexpr double kMinDistSq = 1e-6;
  const int n = sys.dim();

  auto deflation = [&](const Vector& u, Vector* grad) {
    double M = 1.0;
    if (grad) grad->setZero();
    Vector logderiv = Vector::Zero(n);
    for (const auto& ui : known) {
      Vector d = u - ui;
      double dsq = sys.inner(d, d);
      if (dsq < 1e-300) dsq = 1e-300;
      double mi = 1.0 + 1.0 / dsq;
      M *= mi;
      if (grad) logderiv -= (2.0 / (dsq * dsq * mi)) * sys.quadrature_weights().cwiseProduct(d);
    }
    if (grad) *grad = M * logderiv;
    return M;
  };

  Vector u = u0;
  Vector f = sys.residual(u, lambda);
  Vector mgrad(n);
  double M = deflation(u, &mgrad);
  double ng = M * f.norm();
  for (int it = 0; it < maxit; ++it) {
    if (f.norm() <= tol) {
      for (const auto& ui : known) {
        Vector d = u - ui;
        if (sys.inner(d, d) <= kMinDistSq)
          throw NewtonError("deflated_solve: converged to a deflated solution", f.norm());
      }
      return u;
    }
    Matrix G = M * sys.jacobian(u, lambda) + f * mgrad.transpose();
    Vector step = linalg::lu_solve(G, Vector(-M * f));
    double alpha = 1.0;
    Vector u_try, f_try;
    double ng_try;
    while (true) {
      u_try = u + alpha * step;
      f_try = sys.residual(u_try, lambda);
      double M_try = deflation(u_try, nullptr);
      ng_try = M_try * f_try.norm();
      if (ng_try < ng || alpha <= 1e-4) break;
      alpha *= 0.5;
    }
    u = u_try;
    f = f_try;
    M = deflation(u, &mgrad);
    ng = M * f.norm();
  }
  throw NewtonError("deflated_solve: max iterations exceeded", f.norm());
}

}  // namespace hopfkit
