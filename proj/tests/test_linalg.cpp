#include "catch2/catch_amalgamated.hpp"

#include <algorithm>
#include <random>

#include "hopfkit/linalg.hpp"
#include "hopfkit/models/cgl.hpp"
#include "hopfkit/models/fhn.hpp"

using namespace hopfkit;
using Catch::Approx;

namespace {

Matrix random_matrix(int n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = dist(rng);
  return A;
}

// 2x2 planar rotation generator: eigenvalues +-i.
Matrix rotation2() {
  Matrix A(2, 2);
  A << 0, -1, 1, 0;
  return A;
}

}  // namespace

TEST_CASE("lu_solve recovers solutions of real systems") {
  SECTION("identity") {
    Vector b(3);
    b << 1, -2, 3;
    Vector x = linalg::lu_solve(Matrix::Identity(3, 3), b);
    CHECK((x - b).norm() == Approx(0.0).margin(1e-14));
  }
  SECTION("diagonal") {
    Matrix A = Matrix::Zero(4, 4);
    A.diagonal() << 2, -3, 0.5, 10;
    Vector b(4);
    b << 2, 3, 1, 5;
    Vector x = linalg::lu_solve(A, b);
    Vector expect(4);
    expect << 1, -1, 2, 0.5;
    CHECK((x - expect).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-12));
  }
  SECTION("random 50x50 round trip") {
    Matrix A = random_matrix(50, 7);
    A.diagonal().array() += 10;  // keep it comfortably nonsingular
    Vector x_true = random_matrix(50, 8).col(0);
    Vector x = linalg::lu_solve(A, Vector(A * x_true));
    CHECK((x - x_true).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SECTION("singular matrix throws with pivot info") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 1;
    A(1, 1) = 1;  // third row/column identically zero
    Vector b = Vector::Ones(3);
    CHECK_THROWS_AS(linalg::lu_solve(A, b), linalg::SingularMatrixError);
  }
  SECTION("dimension mismatch throws") {
    CHECK_THROWS_AS(linalg::lu_solve(Matrix(Matrix::Identity(3, 3)), Vector(Vector::Ones(2))),
                    std::invalid_argument);
  }
}

TEST_CASE("lu_solve handles complex systems") {
  SECTION("i times identity") {
    ComplexMatrix A = Complex(0, 1) * ComplexMatrix::Identity(2, 2);
    ComplexVector b = ComplexVector::Ones(2);
    ComplexVector x = linalg::lu_solve(A, b);
    // x = -i (1,1)
    CHECK(std::abs(x(0) - Complex(0, -1)) <= 1e-14);
    CHECK(std::abs(x(1) - Complex(0, -1)) <= 1e-14);
  }
  SECTION("shifted Hermitian 2x2") {
    ComplexMatrix A(2, 2);
    A << Complex(3, 0), Complex(0, 1), Complex(0, -1), Complex(3, 0);
    ComplexVector b(2);
    b << Complex(1, 1), Complex(-2, 0.5);
    ComplexVector x = linalg::lu_solve(A, b);
    CHECK((A * x - b).norm() <= 1e-10);
  }
  SECTION("random Hermitian positive definite 20x20") {
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss;
    ComplexMatrix B(20, 20);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) B(i, j) = Complex(gauss(rng), gauss(rng));
    ComplexMatrix A = B.adjoint() * B + 0.1 * ComplexMatrix::Identity(20, 20);
    ComplexVector b(20);
    for (int i = 0; i < 20; ++i) b(i) = Complex(gauss(rng), gauss(rng));
    ComplexVector x = linalg::lu_solve(A, b);
    CHECK((A * x - b).norm() <= 1e-10 * A.norm());
  }
}

TEST_CASE("eig_all on planted spectra") {
  SECTION("rotation generator has eigenvalues +-i") {
    auto pairs = linalg::eig_all(rotation2());
    REQUIRE(pairs.size() == 2);
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.value.imag() < b.value.imag(); });
    CHECK(std::abs(pairs[0].value - Complex(0, -1)) <= 1e-12);
    CHECK(std::abs(pairs[1].value - Complex(0, 1)) <= 1e-12);
    for (const auto& p : pairs)
      CHECK((rotation2() * p.vector - p.value * p.vector).norm() <= 1e-12);
  }
  SECTION("cell model Jacobian at its oscillatory threshold") {
    models::Fhn fhn;
    const double c1 = fhn.hopf_c1();   // trace of F_u vanishes here
    const double mu = fhn.hopf_mu();   // = 0.02265834...
    Vector origin = Vector::Zero(2);
    auto pairs = linalg::eig_all(fhn.jacobian(origin, c1));
    REQUIRE(pairs.size() == 2);
    for (const auto& p : pairs) {
      CHECK(std::abs(p.value.real()) <= 1e-12);
      CHECK(std::abs(p.value.imag()) == Approx(mu).epsilon(1e-10));
    }
    CHECK(mu == Approx(0.0226583).margin(5e-8));
  }
  SECTION("1D finite-difference Laplacian spectrum in closed form") {
    const int N = 9;
    const double h = 0.1;  // interval length 1
    Matrix A = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) {
      A(i, i) = -2 / (h * h);
      if (i > 0) A(i, i - 1) = 1 / (h * h);
      if (i < N - 1) A(i, i + 1) = 1 / (h * h);
    }
    auto pairs = linalg::eig_all(A);
    std::vector<double> got;
    for (const auto& p : pairs) {
      CHECK(std::abs(p.value.imag()) <= 1e-12);
      got.push_back(p.value.real());
    }
    std::sort(got.begin(), got.end());
    std::vector<double> expect;
    for (int k = N; k >= 1; --k) {
      double s = std::sin(k * M_PI * h / 2);
      expect.push_back(-4 / (h * h) * s * s);
    }
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < N; ++i) CHECK(got[static_cast<size_t>(i)] ==
                                      Approx(expect[static_cast<size_t>(i)]).epsilon(1e-10));
  }
  SECTION("complex eigenvalues of real matrices come in conjugate pairs") {
    Matrix A = random_matrix(17, 23);
    auto pairs = linalg::eig_all(A);
    for (const auto& p : pairs) {
      if (std::abs(p.value.imag()) < 1e-12) continue;
      bool found = false;
      for (const auto& q : pairs)
        if (std::abs(q.value - std::conj(p.value)) <= 1e-8 * (1 + std::abs(p.value))) found = true;
      CHECK(found);
    }
  }
  SECTION("eigen residual property on random matrices") {
    for (unsigned seed : {1u, 2u, 3u}) {
      Matrix A = random_matrix(30, seed, 2.0);
      double anorm = A.cwiseAbs().maxCoeff();
      for (const auto& p : linalg::eig_all(A)) {
        CHECK(std::abs(p.vector.norm() - 1.0) <= 1e-12);
        CHECK((A * p.vector - p.value * p.vector).norm() <= 1e-8 * std::max(anorm, 1.0));
      }
    }
  }
}

TEST_CASE("eig_near_shift selects eigenvalues closest to the shift") {
  SECTION("diagonal matrix, real shift") {
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << 1, 5, 10;
    auto pairs = linalg::eig_near_shift(A, Complex(4.9, 0), 1);
    REQUIRE(pairs.size() == 1);
    CHECK(std::abs(pairs[0].value - Complex(5, 0)) <= 1e-12);
  }
  SECTION("imaginary shift targets the oscillatory block") {
    Matrix A = Matrix::Zero(3, 3);
    A.topLeftCorner(2, 2) = rotation2();
    A(2, 2) = -3;
    auto pairs = linalg::eig_near_shift(A, Complex(0, 0.1), 2);
    REQUIRE(pairs.size() == 2);
    CHECK(std::abs(pairs[0].value - Complex(0, 1)) <= 1e-12);  // nearest first
    CHECK(std::abs(std::abs(pairs[1].value.imag()) - 1.0) <= 1e-12);
  }
  SECTION("trivial-branch Jacobian of the reaction-diffusion model") {
    models::CglParams p;
    p.nx = 8;
    p.ny = 4;
    models::Cgl2d cgl(p);
    Vector zero = Vector::Zero(cgl.dim());
    const double r = 0.0;
    Matrix J = cgl.jacobian(zero, r);
    // analytic: eigenvalues r - Lambda_(kx,ky) +- i nu
    double lam11 = cgl.laplacian_eigenvalue(1, 1);
    auto pairs = linalg::eig_near_shift(J, Complex(0, p.nu), 1);
    REQUIRE(pairs.size() == 1);
    CHECK(std::abs(pairs[0].value - Complex(-lam11, p.nu)) <= 1e-8);
  }
  SECTION("subset of the full spectrum") {
    Matrix A = random_matrix(25, 31);
    auto all = linalg::eig_all(A);
    auto sel = linalg::eig_near_shift(A, Complex(0.3, 0.2), 5);
    REQUIRE(sel.size() == 5);
    for (const auto& p : sel) {
      double best = 1e300;
      for (const auto& q : all) best = std::min(best, std::abs(q.value - p.value));
      CHECK(best <= 1e-8);
    }
    // selected values really are the 5 nearest
    std::vector<double> dist_all;
    for (const auto& q : all) dist_all.push_back(std::abs(q.value - Complex(0.3, 0.2)));
    std::sort(dist_all.begin(), dist_all.end());
    double worst_sel = 0;
    for (const auto& p : sel) worst_sel = std::max(worst_sel, std::abs(p.value - Complex(0.3, 0.2)));
    CHECK(worst_sel <= dist_all[4] + 1e-8);
  }
  SECTION("iterative path agrees with the dense path") {
    Matrix A = random_matrix(60, 41);
    A.diagonal().array() -= 1.0;
    Complex sigma(0.0, 0.5);
    auto dense = linalg::eig_near_shift(A, sigma, 3);
    auto arnoldi = linalg::eig_near_shift(A, sigma, 3, /*dense_threshold=*/10);
    REQUIRE(arnoldi.size() == 3);
    for (int i = 0; i < 3; ++i) {
      double best = 1e300;
      for (const auto& d : dense)
        best = std::min(best, std::abs(d.value - arnoldi[static_cast<size_t>(i)].value));
      CHECK(best <= 1e-7);
      const auto& p = arnoldi[static_cast<size_t>(i)];
      CHECK((A * p.vector - p.value * p.vector).norm() <= 1e-7 * A.cwiseAbs().maxCoeff());
    }
  }
  SECTION("shift exactly on an eigenvalue still succeeds via nudge") {
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << 1, 2, 3;
    auto pairs = linalg::eig_near_shift(A, Complex(2, 0), 1, /*dense_threshold=*/0);
    REQUIRE(pairs.size() == 1);
    CHECK(std::abs(pairs[0].value - Complex(2, 0)) <= 1e-6);
  }
}
