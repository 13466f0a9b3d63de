#include <doctest.h>

#include <random>

#include "memgrad/simplex_qp.hpp"
#include "support.hpp"

using namespace memgrad;
using namespace memgrad::test;

TEST_SUITE_BEGIN("qp_inner");

TEST_CASE("project_simplex") {
  SUBCASE("feasible points are fixed") {
    const Vector v = vec({0.3, 0.7});
    CHECK((project_simplex(v) - v).norm() <= 1e-15);
  }
  SUBCASE("singleton always maps to one") {
    CHECK(project_simplex(vec({-17.0}))(0) == doctest::Approx(1.0));
  }
  SUBCASE("sort-and-threshold example") {
    const Vector out = project_simplex(vec({1.0, 0.5, -0.2}));
    CHECK(out(0) == doctest::Approx(0.75));
    CHECK(out(1) == doctest::Approx(0.25));
    CHECK(out(2) == doctest::Approx(0.0));
    // Grid oracle: no simplex point on a 1e-3 grid is closer to v.
    const Vector v = vec({1.0, 0.5, -0.2});
    double best = (out - v).squaredNorm();
    for (int i = 0; i <= 1000; ++i)
      for (int j = 0; j <= 1000 - i; ++j) {
        const Vector w = vec({i / 1000.0, j / 1000.0, 1.0 - (i + j) / 1000.0});
        CHECK((w - v).squaredNorm() >= best - 1e-9);
      }
  }
  SUBCASE("KKT structure: output is a thresholding of the input") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector v = random_vector(rng, 6, 2.0);
      const Vector w = project_simplex(v);
      CHECK(w.minCoeff() >= 0.0);
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
      // Recover theta from any strictly positive coordinate.
      double theta = 0.0;
      for (Eigen::Index i = 0; i < 6; ++i)
        if (w(i) > 0.0) theta = v(i) - w(i);
      for (Eigen::Index i = 0; i < 6; ++i)
        CHECK(w(i) == doctest::Approx(std::max(v(i) - theta, 0.0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("dual_value") {
  SUBCASE("scalar arithmetic") {
    SimplexQP qp{Matrix::Constant(1, 1, 4.0), vec({3}), 1.0};
    CHECK(dual_value(qp, Vector::Ones(1)) == doctest::Approx(-1.0));
  }
  SUBCASE("vanishing quadratic leaves the linear term") {
    SimplexQP qp{Matrix::Zero(3, 3), vec({1, 2, 3}), 0.7};
    const Vector w = vec({0.2, 0.3, 0.5});
    CHECK(dual_value(qp, w) == doctest::Approx(-(0.2 + 0.6 + 1.5)));
  }
  SUBCASE("anti-dual optimum matches the primal optimum") {
    // Primal: min_y max(1 + y, -y) + y^2/2 has its minimum 0.625 at the
    // kink y = -1/2; the dual minimum over the simplex is its negative.
    Matrix q(2, 2);
    q << 1, -1, -1, 1;
    SimplexQP qp{q, vec({1, 0}), 1.0};
    const InnerSolution sol = solve(qp, vec({0.5, 0.5}), 1000, 1e-14);
    CHECK(sol.dual_value == doctest::Approx(-0.625).epsilon(1e-10));
    CHECK(sol.weights(0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(grid_min_dual(qp) == doctest::Approx(-0.625).epsilon(1e-5));
  }
}

TEST_CASE("solve") {
  std::mt19937_64 rng(41);

  SUBCASE("singleton returns immediately") {
    SimplexQP qp{Matrix::Constant(1, 1, 2.0), vec({5}), 3.0};
    const InnerSolution sol = solve(qp, Vector::Ones(1), 100, 1e-12);
    CHECK(sol.weights(0) == 1.0);
    CHECK(sol.iterations == 0);
  }
  SUBCASE("zero budget returns the warm start") {
    SimplexQP qp{random_psd(rng, 4), random_vector(rng, 4), 0.5};
    const Vector warm = random_simplex_point(rng, 4);
    const InnerSolution sol = solve(qp, warm, 0, 1e-12);
    CHECK((sol.weights - warm).norm() <= 1e-12);
    CHECK(sol.dual_value == doctest::Approx(dual_value(qp, warm)));
  }
  SUBCASE("infeasible warm starts are rejected") {
    SimplexQP qp{random_psd(rng, 3), random_vector(rng, 3), 1.0};
    CHECK_THROWS_AS(solve(qp, vec({0.7, 0.7, 0.7}), 10, 1e-9), std::invalid_argument);
  }
  SUBCASE("matches the grid oracle on small instances") {
    for (int trial = 0; trial < 25; ++trial) {
      Matrix q = random_psd(rng, 3);
      q /= q.diagonal().maxCoeff();  // keep the grid discretization error small
      SimplexQP qp{q, random_vector(rng, 3), 0.3};
      const InnerSolution sol =
          solve(qp, random_simplex_point(rng, 3), 2000, 1e-14);
      const double grid = grid_min_dual(qp);
      CHECK(std::abs(sol.dual_value - grid) <= 1e-6);
    }
  }
  SUBCASE("never worse than the warm start") {
    for (int trial = 0; trial < 100; ++trial) {
      const int p = 1 + static_cast<int>(rng() % 8);
      SimplexQP qp{random_psd(rng, p), random_vector(rng, p), 0.01 + 2.0 * (trial % 7)};
      const Vector warm = random_simplex_point(rng, p);
      const double before = dual_value(qp, warm);
      for (const int budget : {0, 1, 3, 10}) {
        const InnerSolution sol = solve(qp, warm, budget, 1e-9);
        CHECK(sol.dual_value <= before + 1e-14 * (1.0 + std::abs(before)));
        CHECK(sol.weights.minCoeff() >= -1e-12);
        CHECK(std::abs(sol.weights.sum() - 1.0) <= 1e-10);
      }
    }
  }
}

TEST_SUITE_END();
