#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopfkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

namespace linalg {

struct SingularMatrixError : std::runtime_error {
  int pivot;
  explicit SingularMatrixError(int piv)
      : std::runtime_error("matrix singular to working precision at pivot " + std::to_string(piv)),
        pivot(piv) {}
};

struct EigConvergenceError : std::runtime_error {
  int converged;
  explicit EigConvergenceError(int conv)
      : std::runtime_error("eigenvalue iteration failed; converged pairs: " + std::to_string(conv)),
        converged(conv) {}
};

namespace detail {

template <typename MatT>
int singular_pivot(const Eigen::PartialPivLU<MatT>& lu, double scale) {
  const auto& U = lu.matrixLU();
  const double tol = 1e-14 * std::max(scale, 1e-300);
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    if (std::abs(U(i, i)) <= tol) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

/// Solve Ax = b by dense LU with partial pivoting.
inline Vector lu_solve(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("lu_solve: dimension mismatch");
  Eigen::PartialPivLU<Matrix> lu(A);
  int piv = detail::singular_pivot(lu, A.cwiseAbs().maxCoeff());
  if (piv >= 0) throw SingularMatrixError(piv);
  return lu.solve(b);
}

inline ComplexVector lu_solve(const ComplexMatrix& A, const ComplexVector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("lu_solve: dimension mismatch");
  Eigen::PartialPivLU<ComplexMatrix> lu(A);
  int piv = detail::singular_pivot(lu, A.cwiseAbs().maxCoeff());
  if (piv >= 0) throw SingularMatrixError(piv);
  return lu.solve(b);
}

struct EigenPair {
  Complex value;
  ComplexVector vector;  // unit norm, largest-magnitude entry rotated to the positive real axis
};

namespace detail {

inline void canonicalize(ComplexVector& v) {
  v.normalize();
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  Complex pivot = v(imax);
  if (std::abs(pivot) > 0) v *= std::conj(pivot) / std::abs(pivot);
}

}  // namespace detail

/// Full eigendecomposition of a real nonsymmetric matrix (Schur based).
inline std::vector<EigenPair> eig_all(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eig_all: matrix not square");
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) throw EigConvergenceError(0);
  std::vector<EigenPair> out(static_cast<size_t>(A.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    out[static_cast<size_t>(i)].value = es.eigenvalues()(i);
    out[static_cast<size_t>(i)].vector = es.eigenvectors().col(i);
    detail::canonicalize(out[static_cast<size_t>(i)].vector);
  }
  return out;
}

constexpr int kDenseEigThreshold = 2500;

namespace detail {

// Shift-invert Arnoldi: eigenpairs of A nearest sigma via Krylov iteration on (A - sigma I)^{-1}.
inline std::vector<EigenPair> shift_invert_arnoldi(const Matrix& A, Complex sigma, int k) {
  const Eigen::Index n = A.rows();
  ComplexMatrix shifted = A.cast<Complex>();
  shifted.diagonal().array() -= sigma;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  if (singular_pivot(lu, shifted.cwiseAbs().maxCoeff()) >= 0)
    throw SingularMatrixError(0);

  const int m = std::min<int>(static_cast<int>(n), std::max(40, 2 * k + 20));
  const double anorm = A.cwiseAbs().maxCoeff();
  std::mt19937 rng(0x5eed);
  std::normal_distribution<double> gauss;
  ComplexVector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = Complex(gauss(rng), gauss(rng));

  std::vector<EigenPair> best;
  for (int restart = 0; restart < 6; ++restart) {
    ComplexMatrix V(n, m + 1);
    ComplexMatrix H = ComplexMatrix::Zero(m + 1, m);
    V.col(0) = start.normalized();
    int mdone = m;
    for (int j = 0; j < m; ++j) {
      ComplexVector w = lu.solve(V.col(j));
      for (int rep = 0; rep < 2; ++rep) {  // modified Gram-Schmidt, one reorthogonalization pass
        for (int i = 0; i <= j; ++i) {
          Complex hij = V.col(i).dot(w);
          if (rep == 0) H(i, j) = hij; else H(i, j) += hij;
          w -= hij * V.col(i);
        }
      }
      H(j + 1, j) = w.norm();
      if (std::abs(H(j + 1, j)) < 1e-14) { mdone = j + 1; break; }
      V.col(j + 1) = w / H(j + 1, j);
    }

    Eigen::ComplexEigenSolver<ComplexMatrix> small(H.topLeftCorner(mdone, mdone));
    std::vector<int> order(static_cast<size_t>(mdone));
    for (int i = 0; i < mdone; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(small.eigenvalues()(a)) > std::abs(small.eigenvalues()(b));
    });

    best.clear();
    bool all_ok = true;
    int kk = std::min(k, mdone);
    for (int i = 0; i < kk; ++i) {
      int idx = order[static_cast<size_t>(i)];
      Complex theta = small.eigenvalues()(idx);
      if (std::abs(theta) < 1e-300) { all_ok = false; break; }
      EigenPair p;
      p.value = sigma + 1.0 / theta;
      ComplexVector x = V.leftCols(mdone) * small.eigenvectors().col(idx);
      canonicalize(x);
      p.vector = x;
      double res = (A * x - p.value * x).norm();
      if (res > 1e-8 * std::max(anorm, 1.0)) all_ok = false;
      best.push_back(std::move(p));
    }
    if (all_ok && static_cast<int>(best.size()) == std::min(k, mdone)) return best;
    // restart from the span of the wanted Ritz vectors
    start.setZero();
    for (const auto& p : best) start += p.vector;
    for (Eigen::Index i = 0; i < n; ++i) start(i) += 1e-3 * Complex(gauss(rng), gauss(rng));
  }
  throw EigConvergenceError(static_cast<int>(best.size()));
}

}  // namespace detail

/// The k eigenpairs of A nearest the shift sigma.
inline std::vector<EigenPair> eig_near_shift(const Matrix& A, Complex sigma, int k,
                                             int dense_threshold = kDenseEigThreshold) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eig_near_shift: matrix not square");
  k = std::min<int>(k, static_cast<int>(A.rows()));
  if (A.rows() <= dense_threshold) {
    auto all = eig_all(A);
    std::sort(all.begin(), all.end(), [&](const EigenPair& a, const EigenPair& b) {
      return std::abs(a.value - sigma) < std::abs(b.value - sigma);
    });
    all.resize(static_cast<size_t>(k));
    return all;
  }
  try {
    return detail::shift_invert_arnoldi(A, sigma, k);
  } catch (const SingularMatrixError&) {
    Complex nudged = sigma + 1e-6 * (1.0 + std::abs(sigma));
    return detail::shift_invert_arnoldi(A, nudged, k);
  }
}

}  // namespace linalg
}  // namespace hopfkit
