#include "catch2/catch_amalgamated.hpp"

#include "hopfkit/models/brusselator.hpp"
#include "hopfkit/models/cgl.hpp"
#include "hopfkit/models/fhn.hpp"
#include "hopfkit/steady.hpp"
#include "util.hpp"

using namespace hopfkit;
using Catch::Approx;

TEST_CASE("newton_steady converges to known equilibria") {
  SECTION("cell model from a nearby start") {
    models::Fhn fhn;
    Vector u0(2);
    u0 << 0.2, 0.1;
    Vector u = newton_steady(fhn, u0, 0.05);
    CHECK(u.norm() <= 1e-10);
  }
  SECTION("reaction kinetics from a perturbed start") {
    models::Brusselator bru;
    Vector u0(2);
    u0 << 1.1, 1.9;
    Vector u = newton_steady(bru, u0, 2.0);
    CHECK(std::abs(u(0) - 1.0) <= 1e-9);
    CHECK(std::abs(u(1) - 2.0) <= 1e-9);
  }
  SECTION("trivial state is accepted without iterating") {
    models::CglParams p;
    p.nx = 8;
    p.ny = 4;
    models::Cgl2d cgl(p);
    Vector zero = Vector::Zero(cgl.dim());
    Vector u = newton_steady(cgl, zero, 1.7);
    CHECK((u - zero).norm() == 0.0);  // residual already below tolerance
  }
  SECTION("failure reports the residual") {
    // g(v) has no root reachable from far out within 2 iterations
    models::Fhn fhn;
    Vector u0(2);
    u0 << 50.0, -30.0;
    CHECK_THROWS_AS(newton_steady(fhn, u0, 0.15, 1e-12, 2), NewtonError);
  }
  SECTION("invalid tolerance is rejected") {
    models::Fhn fhn;
    CHECK_THROWS_AS(newton_steady(fhn, Vector::Zero(2), 0.05, -1.0), std::invalid_argument);
  }
}

TEST_CASE("continue_branch records the stability change") {
  SECTION("cell model growth rate changes sign across the threshold") {
    models::Fhn fhn;
    ContinuationTrace tr = continue_branch(fhn, Vector::Zero(2), 0.03, 0.07, 9, 2);
    REQUIRE(!tr.truncated);
    REQUIRE(tr.records.size() == 9);
    // uniform grid
    for (size_t i = 0; i < tr.records.size(); ++i)
      CHECK(tr.records[i].lambda == Approx(0.03 + 0.005 * static_cast<double>(i)));
    // sign change of the leading growth rate brackets 0.0504167
    double threshold = fhn.hopf_c1();
    bool bracketed = false;
    for (size_t i = 1; i < tr.records.size(); ++i) {
      if (tr.records[i - 1].max_growth < 0 && tr.records[i].max_growth > 0) {
        CHECK(tr.records[i - 1].lambda < threshold);
        CHECK(tr.records[i].lambda > threshold);
        bracketed = true;
      }
    }
    CHECK(bracketed);
  }
  SECTION("reaction kinetics brackets b = 2") {
    models::Brusselator bru;
    ContinuationTrace tr = continue_branch(bru, bru.initial_state(), 1.5, 2.5, 9, 2);
    REQUIRE(!tr.truncated);
    const double spacing = 0.125;
    bool bracketed = false;
    for (size_t i = 1; i < tr.records.size(); ++i)
      if (tr.records[i - 1].max_growth < 0 && tr.records[i].max_growth >= 0) {
        // crossing is at b = 2 exactly; a grid point can land right on it
        CHECK(tr.records[i - 1].lambda <= 2.0 + 1e-12);
        CHECK(tr.records[i].lambda >= 2.0 - spacing - 1e-12);
        bracketed = true;
      }
    CHECK(bracketed);
  }
  SECTION("reaction-diffusion trivial branch crosses near its discrete threshold") {
    models::CglParams p;
    p.nx = 8;
    p.ny = 4;
    models::Cgl2d cgl(p);
    double lam11 = cgl.laplacian_eigenvalue(1, 1);
    ContinuationTrace tr =
        continue_branch(cgl, Vector::Zero(cgl.dim()), lam11 - 0.3, lam11 + 0.3, 7, 4);
    REQUIRE(!tr.truncated);
    bool bracketed = false;
    for (size_t i = 1; i < tr.records.size(); ++i)
      if (tr.records[i - 1].max_growth < 0 && tr.records[i].max_growth > 0) bracketed = true;
    CHECK(bracketed);
  }
  SECTION("warm start is consistent when the grid is refined") {
    models::Fhn fhn;
    ContinuationTrace coarse = continue_branch(fhn, Vector::Zero(2), 0.03, 0.07, 5, 2);
    ContinuationTrace fine = continue_branch(fhn, Vector::Zero(2), 0.03, 0.07, 9, 2);
    REQUIRE(coarse.records.size() == 5);
    REQUIRE(fine.records.size() == 9);
    for (size_t i = 0; i < 5; ++i) {
      const auto& c = coarse.records[i];
      const auto& f = fine.records[2 * i];  // shared grid point
      CHECK(c.lambda == Approx(f.lambda));
      CHECK((c.u - f.u).norm() <= 1e-8);
    }
  }
  SECTION("step-count guard") {
    models::Fhn fhn;
    CHECK_THROWS_AS(continue_branch(fhn, Vector::Zero(2), 0.03, 0.07, 1), std::invalid_argument);
  }
}

TEST_CASE("deflated_solve finds additional roots") {
  SECTION("scalar quadratic: deflating one root yields the other") {
    testutil::ScalarSystem sys([](double x) { return x * x - 1; }, [](double x) { return 2 * x; });
    Vector known(1), u0(1);
    known << 1.0;
    u0 << 0.9;  // starts in the basin of the deflated root
    Vector u = deflated_solve(sys, {known}, u0, 0.0);
    CHECK(u(0) == Approx(-1.0).margin(1e-9));
  }
  SECTION("scalar cubic: deflating two roots yields the third") {
    testutil::ScalarSystem sys([](double x) { return x * (x - 1) * (x - 2); },
                               [](double x) { return 3 * x * x - 6 * x + 2; });
    Vector r0(1), r1(1), u0(1);
    r0 << 0.0;
    r1 << 1.0;
    u0 << 0.4;
    Vector u = deflated_solve(sys, {r0, r1}, u0, 0.0);
    CHECK(u(0) == Approx(2.0).margin(1e-9));
  }
  SECTION("cell model: second equilibrium off the origin") {
    models::FhnParams p;  // weak coupling so the nullclines intersect again
    p.c2 = 0.005;
    models::Fhn fhn(p);
    const double c1 = 0.15;
    Vector origin = Vector::Zero(2);
    Vector u0(2);
    u0 << 0.5, 0.5;
    Vector u = deflated_solve(fhn, {origin}, u0, c1);
    CHECK(fhn.residual(u, c1).norm() <= 1e-10);
    // distance from the deflated root
    CHECK(fhn.inner(u - origin, u - origin) > 1e-3);
    // nullcline oracle: w = v / c3 and c1 (v - a)(1 - v) = c2 / c3
    double v = u(0);
    CHECK(u(1) == Approx(v / p.c3).epsilon(1e-8));
    CHECK(c1 * (v - p.a) * (1 - v) == Approx(p.c2 / p.c3).epsilon(1e-8));
  }
  SECTION("re-converging to a deflated root is an error") {
    // f(x) = x^2: only root is deflated, iteration cannot settle elsewhere
    testutil::ScalarSystem sys([](double x) { return std::sin(x); },
                               [](double x) { return std::cos(x); });
    Vector known(1), u0(1);
    known << 0.0;
    u0 << 0.5;
    Vector u = deflated_solve(sys, {known}, u0, 0.0);
    // pushed to a different root of sin
    CHECK(std::abs(std::sin(u(0))) <= 1e-10);
    CHECK(std::abs(u(0)) > 1.0);
  }
}
