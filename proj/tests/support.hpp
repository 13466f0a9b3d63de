// Shared fixtures and independent reference implementations used by the
// unit and acceptance suites. Everything here is deliberately written from
// the mathematical definitions, not through the library's solver paths, so
// it can serve as an oracle for them.
#ifndef MEMGRAD_TESTS_SUPPORT_HPP_
#define MEMGRAD_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "memgrad/agmm.hpp"
#include "memgrad/problem.hpp"
#include "memgrad/problems.hpp"
#include "memgrad/simplex_qp.hpp"

namespace memgrad::test {

// --- toy problems -----------------------------------------------------------

/// f(x) = 1/2 x' P x + q' x, psi = 0.
inline OracleProblem quadratic_problem(const Matrix& P, const Vector& q) {
  OracleProblem prob;
  prob.dimension = P.rows();
  prob.f_value = [P, q](const Vector& x) { return 0.5 * x.dot(P * x) + q.dot(x); };
  prob.f_gradient = [P, q](const Vector& x) { return Vector(P * x + q); };
  prob.psi_value = [](const Vector&) { return 0.0; };
  prob.prox = [](const Vector& x, double) { return x; };
  return prob;
}

/// 1-D f(x) = (c/2)(x - center)^2, psi = 0.
inline OracleProblem scalar_quadratic(double c, double center) {
  OracleProblem prob;
  prob.dimension = 1;
  prob.f_value = [c, center](const Vector& x) {
    const double d = x(0) - center;
    return 0.5 * c * d * d;
  };
  prob.f_gradient = [c, center](const Vector& x) {
    Vector g(1);
    g(0) = c * (x(0) - center);
    return g;
  };
  prob.psi_value = [](const Vector&) { return 0.0; };
  prob.prox = [](const Vector& x, double) { return x; };
  prob.mu_f = c;
  prob.lipschitz_hint = c;
  return prob;
}

/// f = 1/2 ||Ax - b||^2, psi = lambda1 |x|_1 (identity A by default).
inline OracleProblem lasso_problem(const Matrix& A, const Vector& b, double lambda1) {
  OracleProblem prob;
  prob.dimension = A.cols();
  prob.f_value = [A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); };
  prob.f_gradient = [A, b](const Vector& x) { return Vector(A.transpose() * (A * x - b)); };
  prob.psi_value = [lambda1](const Vector& x) { return lambda1 * x.lpNorm<1>(); };
  prob.prox = [lambda1](const Vector& x, double tau) { return shrinkage(x, tau * lambda1); };
  return prob;
}

/// Indicator of the nonnegative orthant as regularizer.
inline OracleProblem nonneg_quadratic(const Matrix& P, const Vector& q) {
  OracleProblem prob = quadratic_problem(P, q);
  prob.psi_value = [](const Vector& x) {
    return x.minCoeff() < 0.0 ? kInfinity : 0.0;
  };
  prob.prox = [](const Vector& x, double) { return Vector(x.cwiseMax(0.0)); };
  return prob;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v(i++) = value;
  return v;
}

// --- random data ------------------------------------------------------------

inline Matrix random_psd(std::mt19937_64& rng, int p, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Matrix g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = normal(rng);
  return Matrix(scale * (g.transpose() * g) / p);
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Vector random_simplex_point(std::mt19937_64& rng, int p) {
  std::exponential_distribution<double> expo(1.0);
  Vector v(p);
  for (int i = 0; i < p; ++i) v(i) = expo(rng);
  return Vector(v / v.sum());
}

// --- independent oracles ----------------------------------------------------

/// Central finite differences of a scalar function.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                         const Vector& x, double h = 1e-6) {
  Vector grad(x.size());
  Vector e = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    e(i) = xi + h;
    const double up = f(e);
    e(i) = xi - h;
    const double down = f(e);
    e(i) = xi;
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Brute-force minimum of the inner dual over a uniform grid of the simplex
/// with the given resolution. Supports p in {1, 2, 3}.
inline double grid_min_dual(const SimplexQP& qp, double resolution = 1e-3) {
  const Eigen::Index p = qp.payload.size();
  const auto steps = static_cast<long>(std::lround(1.0 / resolution));
  double best = kInfinity;
  if (p == 1) {
    return dual_value(qp, Vector::Ones(1));
  }
  if (p == 2) {
    Vector w(2);
    for (long i = 0; i <= steps; ++i) {
      w(0) = static_cast<double>(i) / steps;
      w(1) = 1.0 - w(0);
      best = std::min(best, dual_value(qp, w));
    }
    return best;
  }
  Vector w(3);
  for (long i = 0; i <= steps; ++i) {
    for (long j = 0; j <= steps - i; ++j) {
      w(0) = static_cast<double>(i) / steps;
      w(1) = static_cast<double>(j) / steps;
      w(2) = 1.0 - w(0) - w(1);
      best = std::min(best, dual_value(qp, w));
    }
  }
  return best;
}

/// Plain proximal gradient method with the same backtracking rule as the
/// library solvers, written independently: returns the iterates x_1..x_T.
inline std::vector<Vector> reference_proximal_gradient(const OracleProblem& prob,
                                                       Vector x, double L0,
                                                       double ru, double rd,
                                                       int iterations) {
  std::vector<Vector> iterates;
  double L_prev = L0;
  for (int k = 0; k < iterations; ++k) {
    double L = rd * L_prev;
    const double fx = prob.f_value(x);
    while (true) {
      const Vector grad = prob.f_gradient(x);
      const Vector t = prob.prox(x - grad / L, 1.0 / L);
      const Vector d = t - x;
      if (prob.f_value(t) <=
          fx + grad.dot(d) + 0.5 * L * d.squaredNorm() + ineq_slack(fx)) {
        x = t;
        break;
      }
      L *= ru;
    }
    L_prev = L;
    iterates.push_back(x);
  }
  return iterates;
}

/// Memory-less accelerated composite gradient reference, strong convexity
/// aware; returns the iterates x_1..x_T.
inline std::vector<Vector> reference_acgm(const OracleProblem& prob, Vector x,
                                          double L0, double ru, double rd,
                                          double mu_f, double mu_psi,
                                          int iterations) {
  const double mu = mu_f + mu_psi;
  std::vector<Vector> iterates;
  Vector v = x;
  const Vector x0 = x;
  double A = 0.0;
  double h = 0.0;
  Vector g = Vector::Zero(prob.dimension);
  double L_prev = L0;
  for (int k = 0; k < iterations; ++k) {
    double L = rd * L_prev;
    double a;
    Vector y, xn;
    while (true) {
      if (L <= mu_f) {
        L *= ru;
        continue;
      }
      const double gamma = 1.0 + mu * A;
      const double linear = gamma + A * mu;
      a = linear / (2.0 * (L - mu_f)) *
          (1.0 + std::sqrt(1.0 + 4.0 * (L - mu_f) * A * gamma / (linear * linear)));
      const double gamma_bar = 1.0 + mu * (A + a);
      y = (A * gamma_bar * x + a * gamma * v) / (A * gamma_bar + a * gamma);
      const double fy = prob.f_value(y);
      const Vector grad = prob.f_gradient(y);
      xn = prob.prox(y - grad / L, 1.0 / L);
      const Vector d = xn - y;
      if (prob.f_value(xn) <=
          fy + grad.dot(d) + 0.5 * L * d.squaredNorm() + ineq_slack(fy))
        break;
      L *= ru;
    }
    const double F = composite_value(prob, xn);
    const double hbar = F - 0.5 * (L - mu_f) * y.squaredNorm() +
                        0.5 * (L + mu_psi) * xn.squaredNorm() -
                        0.5 * mu * x0.squaredNorm();
    Vector gbar = (L - mu_f) * y - (L + mu_psi) * xn;
    if (mu != 0.0) gbar += mu * x0;
    if (k == 0) {
      A = a;
      h = hbar;
      g = gbar;
    } else {
      const double total = A + a;
      h = (A * h + a * hbar) / total;
      g = (A * g + a * gbar) / total;
      A = total;
    }
    v = x0 - (A / (1.0 + mu * A)) * g;
    x = xn;
    L_prev = L;
    iterates.push_back(x);
  }
  return iterates;
}

}  // namespace memgrad::test

#endif  // MEMGRAD_TESTS_SUPPORT_HPP_
