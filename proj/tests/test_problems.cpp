#include <doctest.h>

#include <random>

#include "memgrad/problems.hpp"
#include "support.hpp"

using namespace memgrad;
using namespace memgrad::test;

TEST_SUITE_BEGIN("problems");

TEST_CASE("shrinkage") {
  const Vector out = shrinkage(vec({3, -0.5}), 1.0);
  CHECK(out(0) == doctest::Approx(2.0));
  CHECK(out(1) == doctest::Approx(0.0));

  // Vanishing threshold approaches the identity.
  const Vector x = vec({1.5, -2.5, 0.0});
  CHECK((shrinkage(x, 1e-300) - x).norm() <= 1e-12);

  // Prox optimality of the soft threshold against random perturbations.
  std::mt19937_64 rng(3);
  const double lambda1 = 0.8;
  const double tau = 0.6;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = random_vector(rng, 4, 2.0);
    const Vector z = shrinkage(v, tau * lambda1);
    const double value = lambda1 * z.lpNorm<1>() + (z - v).squaredNorm() / (2.0 * tau);
    const Vector other = z + random_vector(rng, 4, 0.3);
    const double competing =
        lambda1 * other.lpNorm<1>() + (other - v).squaredNorm() / (2.0 * tau);
    CHECK(value <= competing + ineq_slack(value));
  }
}

TEST_CASE("logistic_pieces") {
  SUBCASE("at zero") {
    const auto [softplus, logistic] = logistic_pieces(Vector::Zero(5));
    CHECK(softplus == doctest::Approx(5.0 * std::log(2.0)));
    for (int i = 0; i < 5; ++i) CHECK(logistic(i) == doctest::Approx(0.5));
  }
  SUBCASE("saturation without overflow") {
    const auto [softplus, logistic] = logistic_pieces(vec({1000.0, -1000.0}));
    CHECK(softplus == doctest::Approx(1000.0));
    CHECK(logistic(0) == doctest::Approx(1.0));
    CHECK(logistic(1) == doctest::Approx(0.0));
  }
  SUBCASE("gradient of the logistic loss matches finite differences") {
    ProblemSpec spec;
    spec.kind = ProblemKind::L1LR;
    spec.rows = 12;
    spec.cols = 6;
    spec.seed = 7;
    const ProblemInstance instance = make_problem(spec);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 3; ++trial) {
      const Vector x = random_vector(rng, 6, 0.5);
      const Vector grad = instance.problem.f_gradient(x);
      const Vector fd = finite_difference_gradient(instance.problem.f_value, x, 1e-6);
      CHECK((grad - fd).norm() <= 1e-6 * (1.0 + grad.norm()));
    }
  }
}

TEST_CASE("make_problem per-kind structure") {
  SUBCASE("ridge regression has the advertised inverse condition number") {
    ProblemSpec spec;
    spec.kind = ProblemKind::RR;
    spec.seed = 11;
    const ProblemInstance instance = make_problem(spec);
    const double q = instance.problem.mu() /
                     (*instance.problem.lipschitz_hint + instance.problem.mu_psi);
    CHECK(q == doctest::Approx(1.0 / 1001.0).epsilon(1e-12));
    CHECK(instance.problem.mu_f == 0.0);
  }
  SUBCASE("elastic net prox formula") {
    ProblemSpec spec;
    spec.kind = ProblemKind::EN;
    spec.rows = 4;
    spec.cols = 1;
    spec.lambda1 = 1.0;
    spec.lambda2 = 1.0;
    spec.seed = 13;
    const ProblemInstance instance = make_problem(spec);
    CHECK(instance.problem.prox(vec({2}), 1.0)(0) == doctest::Approx(0.5));
    CHECK(instance.problem.mu_psi == doctest::Approx(1.0));
  }
  SUBCASE("nnls prox clips to the orthant and psi flags infeasibility") {
    ProblemSpec spec;
    spec.kind = ProblemKind::NNLS;
    spec.rows = 30;
    spec.cols = 20;
    spec.seed = 17;
    const ProblemInstance instance = make_problem(spec);
    const Vector proxed = instance.problem.prox(vec({1, -2, 0, 0.5, -0.1,
                                                     1, 1, 1, 1, 1,
                                                     1, 1, 1, 1, 1,
                                                     1, 1, 1, 1, 1}), 0.3);
    CHECK(proxed.minCoeff() == 0.0);
    CHECK(std::isinf(instance.problem.psi_value(vec({1, -1e-9, 0, 0, 0,
                                                     0, 0, 0, 0, 0,
                                                     0, 0, 0, 0, 0,
                                                     0, 0, 0, 0, 0}))));
  }
  SUBCASE("lasso starting point is dense, l1lr's is 10-sparse") {
    ProblemSpec lasso;
    lasso.kind = ProblemKind::LASSO;
    lasso.seed = 19;
    CHECK((make_problem(lasso).x0.array() != 0.0).count() == 100);

    ProblemSpec l1lr;
    l1lr.kind = ProblemKind::L1LR;
    l1lr.seed = 19;
    const ProblemInstance instance = make_problem(l1lr);
    CHECK((instance.x0.array() != 0.0).count() == 10);
    CHECK(instance.problem.lipschitz_hint ==
          doctest::Approx(0.25 * instance.sigma_max_sq));
  }
}

TEST_CASE("gradients match finite differences on every kind") {
  std::mt19937_64 rng(21);
  for (const ProblemKind kind : {ProblemKind::LASSO, ProblemKind::NNLS,
                                 ProblemKind::L1LR, ProblemKind::RR, ProblemKind::EN}) {
    ProblemSpec spec;
    spec.kind = kind;
    spec.rows = 15;
    spec.cols = 10;
    spec.seed = 23;
    const ProblemInstance instance = make_problem(spec);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = random_vector(rng, 10, 0.5);
      const Vector grad = instance.problem.f_gradient(x);
      const Vector fd = finite_difference_gradient(instance.problem.f_value, x, 1e-5);
      CHECK((grad - fd).norm() <= 1e-5 * (1.0 + grad.norm()));
    }
  }
}

TEST_CASE("prox optimality holds for every kind") {
  std::mt19937_64 rng(25);
  for (const ProblemKind kind : {ProblemKind::LASSO, ProblemKind::NNLS,
                                 ProblemKind::L1LR, ProblemKind::RR, ProblemKind::EN}) {
    ProblemSpec spec;
    spec.kind = kind;
    spec.rows = 12;
    spec.cols = 8;
    spec.seed = 27;
    const ProblemInstance instance = make_problem(spec);
    const auto& prob = instance.problem;
    for (int trial = 0; trial < 100; ++trial) {
      const Vector v = random_vector(rng, 8, 2.0);
      const double tau = 0.1 + 2.0 * (trial % 5);
      const Vector z = prob.prox(v, tau);
      const double psi_z = prob.psi_value(z);
      REQUIRE(std::isfinite(psi_z));  // prox output is feasible
      const double value = psi_z + (z - v).squaredNorm() / (2.0 * tau);
      Vector other = z + random_vector(rng, 8, 0.25);
      if (kind == ProblemKind::NNLS) other = other.cwiseMax(0.0);
      const double competing =
          prob.psi_value(other) + (other - v).squaredNorm() / (2.0 * tau);
      CHECK(value <= competing + ineq_slack(value));
    }
  }
}

TEST_CASE("descent condition holds at the Lipschitz hint") {
  std::mt19937_64 rng(29);
  for (const ProblemKind kind : {ProblemKind::LASSO, ProblemKind::NNLS,
                                 ProblemKind::L1LR, ProblemKind::RR, ProblemKind::EN}) {
    ProblemSpec spec;
    spec.kind = kind;
    spec.rows = 20;
    spec.cols = 12;
    spec.seed = 31;
    const ProblemInstance instance = make_problem(spec);
    CountingOracle oracle(instance.problem);
    const double hint = *instance.problem.lipschitz_hint;
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = random_vector(rng, 12, 1.0);
      const ProxStepResult step = prox_grad_step(oracle, x, hint);
      CHECK(descent_condition(oracle, x, step, hint));
    }
  }
}

TEST_CASE("identical specs reproduce bit-identical instances") {
  std::mt19937_64 rng(33);
  for (const ProblemKind kind : {ProblemKind::LASSO, ProblemKind::NNLS,
                                 ProblemKind::L1LR, ProblemKind::RR, ProblemKind::EN}) {
    ProblemSpec spec;
    spec.kind = kind;
    spec.seed = 35;
    const ProblemInstance one = make_problem(spec);
    const ProblemInstance two = make_problem(spec);
    CHECK((one.x0 - two.x0).norm() == 0.0);
    CHECK(one.sigma_max_sq == two.sigma_max_sq);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = random_vector(rng, one.problem.dimension, 1.0);
      CHECK(one.problem.f_value(x) == two.problem.f_value(x));
      CHECK((one.problem.f_gradient(x) - two.problem.f_gradient(x)).norm() == 0.0);
      CHECK(one.problem.psi_value(x) == two.problem.psi_value(x));
    }
  }
  // Different seeds produce different data.
  ProblemSpec spec;
  spec.kind = ProblemKind::LASSO;
  spec.seed = 35;
  ProblemSpec other = spec;
  other.seed = 36;
  CHECK((make_problem(spec).x0 - make_problem(other).x0).norm() > 0.0);
}

TEST_SUITE_END();
