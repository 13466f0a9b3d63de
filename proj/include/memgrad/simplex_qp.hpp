#ifndef MEMGRAD_SIMPLEX_QP_HPP_
#define MEMGRAD_SIMPLEX_QP_HPP_

#include "memgrad/problem.hpp"

namespace memgrad {

/// The p-dimensional inner problem
///   min over the simplex of d(w) = (scale/2) <w, Q w> - <payload, w>,
/// where Q is the bundle Gram matrix and payload is B (fixed-point methods)
/// or C (accelerated methods).
struct SimplexQP {
  Matrix gram;
  Vector payload;
  double scale = 1.0;
};

struct InnerSolution {
  Vector weights;
  double dual_value = 0.0;
  int iterations = 0;
};

/// Euclidean projection onto the probability simplex (sort-and-threshold).
Vector project_simplex(const Vector& v);

double dual_value(const SimplexQP& qp, const Vector& weights);

/**
 * Projected fast gradient method over the simplex, warm started.
 *
 * Returns the best iterate seen, so the output dual value never exceeds the
 * warm start's: the outer convergence guarantees rely on exactly that and on
 * nothing else about solution quality. Stops after max_iterations or when
 * the projected-gradient mapping norm drops to tolerance. Makes no calls to
 * the outer problem's oracle.
 */
InnerSolution solve(const SimplexQP& qp, const Vector& warm_start,
                    int max_iterations, double tolerance);

}  // namespace memgrad

#endif  // MEMGRAD_SIMPLEX_QP_HPP_
