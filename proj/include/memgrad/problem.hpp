#ifndef MEMGRAD_PROBLEM_HPP_
#define MEMGRAD_PROBLEM_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace memgrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Relative slack used whenever an analytic inequality is evaluated in
/// floating point. `reference` is the magnitude the comparison lives on.
inline double ineq_slack(double reference) {
  return 10.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(reference));
}

/**
 * First-order oracle for a composite objective F = f + psi.
 *
 * f is smooth with Lipschitz-continuous gradient, psi is a proper closed
 * convex regularizer accessed only through its value and proximal operator.
 * psi_value may return +inf; infeasibility is a legitimate value, never an
 * error. Instances are immutable after construction and may be shared
 * freely across threads; solvers keep their own call counters.
 */
struct OracleProblem {
  Eigen::Index dimension = 0;
  std::function<double(const Vector&)> f_value;
  std::function<Vector(const Vector&)> f_gradient;
  std::function<double(const Vector&)> psi_value;
  /// prox(x, tau) = argmin_z psi(z) + ||z - x||^2 / (2 tau), tau > 0.
  std::function<Vector(const Vector&, double)> prox;
  double mu_f = 0.0;    ///< strong convexity parameter of f (>= 0)
  double mu_psi = 0.0;  ///< strong convexity parameter of psi (>= 0)
  std::optional<double> lipschitz_hint;  ///< L_f when known

  double mu() const { return mu_f + mu_psi; }
};

struct OracleCounts {
  long f_values = 0;   // raw smooth-part evaluations
  long gradients = 0;  // f gradient calls
  long proxes = 0;     // proximal operator calls
  long objectives = 0; // full composite F evaluations
};

struct ObjectiveParts {
  double smooth = 0.0;
  double regularizer = 0.0;
  double total() const { return smooth + regularizer; }
};

/// Per-solver view of an OracleProblem that tallies oracle calls.
/// The problem is shared and read-only; the counters belong to one solver.
class CountingOracle {
 public:
  explicit CountingOracle(const OracleProblem& prob) : prob_(&prob) {}

  const OracleProblem& problem() const { return *prob_; }
  Eigen::Index dimension() const { return prob_->dimension; }
  const OracleCounts& counts() const { return counts_; }

  double f_value(const Vector& x) {
    ++counts_.f_values;
    return prob_->f_value(x);
  }
  Vector f_gradient(const Vector& x) {
    ++counts_.gradients;
    return prob_->f_gradient(x);
  }
  double psi_value(const Vector& x) const { return prob_->psi_value(x); }
  Vector prox(const Vector& x, double tau) {
    ++counts_.proxes;
    return prob_->prox(x, tau);
  }

  /// F(x) counted as one composite objective evaluation.
  double objective(const Vector& x) { return objective_parts(x).total(); }

  ObjectiveParts objective_parts(const Vector& x) {
    ++counts_.objectives;
    ObjectiveParts parts;
    parts.regularizer = prob_->psi_value(x);
    // Skip the expensive smooth part outside the feasible set.
    parts.smooth = std::isinf(parts.regularizer) ? 0.0 : prob_->f_value(x);
    return parts;
  }

  /// Completes a composite evaluation when the smooth part is already known.
  double finish_objective(double smooth_value, const Vector& x) {
    ++counts_.objectives;
    return smooth_value + prob_->psi_value(x);
  }

 private:
  const OracleProblem* prob_;
  OracleCounts counts_;
};

/**
 * One composite gradient mapping evaluation at a point x.
 *
 * point        = T_L(x) = prox(x - grad f(x)/L, 1/L)
 * mapping      = g_L(x) = (L + mu_psi) (x - T_L(x))
 * scalar_bound = h_F(x) = F(T_L(x)) + ||g_L(x)||^2/(2(L+mu_psi)) - <g_L(x), x>
 * step_inverse = L + mu_psi, so the fallback step size is 1/step_inverse.
 */
struct ProxStepResult {
  Vector point;
  Vector mapping;
  double scalar_bound = 0.0;
  double objective_at_point = 0.0;
  double step_inverse = 0.0;
};

/// F(x) = f(x) + psi(x); +inf when x is infeasible. Pure, uncounted.
double composite_value(const OracleProblem& prob, const Vector& x);

/// Proximal gradient step at x with parameter L > 0.
/// Costs exactly one gradient call, one prox call and one composite
/// objective evaluation on the oracle.
ProxStepResult prox_grad_step(CountingOracle& oracle, const Vector& x, double L);

/// Local upper bound rule at x: true iff
///   f(T_L(x)) <= f(x) + <grad f(x), T_L(x) - x> + (L/2) ||T_L(x) - x||^2,
/// with the standard relative slack absorbing rounding.
bool descent_condition(CountingOracle& oracle, const Vector& x,
                       const ProxStepResult& result, double L);

/// Certified global lower bound on F at y built from a prox step taken at
/// x_center: h_F + <g_F, y> + (mu/2) ||y - x_center||^2.
double lower_bound_value(const ProxStepResult& result, const Vector& x_center,
                         const Vector& y, double mu);

}  // namespace memgrad

#endif  // MEMGRAD_PROBLEM_HPP_
