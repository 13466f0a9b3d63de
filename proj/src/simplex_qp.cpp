#include "memgrad/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace memgrad {

namespace {
constexpr double kFeasibilityTolerance = 1e-8;

bool in_simplex(const Vector& w) {
  return w.minCoeff() >= -kFeasibilityTolerance &&
         std::abs(w.sum() - 1.0) <= kFeasibilityTolerance;
}
}  // namespace

Vector project_simplex(const Vector& v_raw) {
  const Eigen::Index p = v_raw.size();
  if (p == 1) return Vector::Ones(1);
  // The projection is invariant to shifts along the all-ones direction;
  // anchoring the maximum at zero keeps the threshold arithmetic exact even
  // for inputs far outside the simplex.
  const Vector v = v_raw.array() - v_raw.maxCoeff();
  std::vector<double> u(v.data(), v.data() + p);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      rho = static_cast<int>(j + 1);
      theta = candidate;
    }
  }
  (void)rho;
  return v.unaryExpr([theta](double x) { return std::max(x - theta, 0.0); });
}

double dual_value(const SimplexQP& qp, const Vector& weights) {
  return 0.5 * qp.scale * weights.dot(qp.gram * weights) - qp.payload.dot(weights);
}

InnerSolution solve(const SimplexQP& qp, const Vector& warm_start,
                    int max_iterations, double tolerance) {
  const Eigen::Index p = qp.payload.size();
  if (warm_start.size() != p)
    throw std::invalid_argument("simplex_qp: warm start size mismatch");
  if (!in_simplex(warm_start))
    throw std::invalid_argument("simplex_qp: warm start outside the simplex");

  InnerSolution best;
  if (p == 1) {
    best.weights = Vector::Ones(1);
    best.dual_value = dual_value(qp, best.weights);
    return best;
  }

  Vector lambda = project_simplex(warm_start);
  best.weights = lambda;
  best.dual_value = dual_value(qp, lambda);
  if (max_iterations <= 0) return best;

  // Cheap valid Lipschitz bound for the dual gradient: scale * trace(Q).
  const double lips = qp.scale * qp.gram.trace();
  if (!(lips > 1e-280)) {
    // Degenerate quadratic term: the dual is linear, minimized at a vertex.
    Eigen::Index vertex;
    qp.payload.maxCoeff(&vertex);
    Vector w = Vector::Zero(p);
    w(vertex) = 1.0;
    const double value = dual_value(qp, w);
    if (value < best.dual_value) {
      best.weights = w;
      best.dual_value = value;
    }
    return best;
  }

  Vector y = lambda;
  double t = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector grad = qp.scale * (qp.gram * y) - qp.payload;
    const Vector next = project_simplex(y - grad / lips);
    const double mapping_norm = lips * (y - next).norm();
    const double value = dual_value(qp, next);
    if (value < best.dual_value) {
      best.weights = next;
      best.dual_value = value;
    }
    best.iterations = it + 1;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - lambda);
    lambda = next;
    t = t_next;
    if (mapping_norm <= tolerance) break;
  }
  return best;
}

}  // namespace memgrad
