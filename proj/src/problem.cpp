#include "memgrad/problem.hpp"

namespace memgrad {

double composite_value(const OracleProblem& prob, const Vector& x) {
  const double psi = prob.psi_value(x);
  if (std::isinf(psi)) return kInfinity;
  return prob.f_value(x) + psi;
}

ProxStepResult prox_grad_step(CountingOracle& oracle, const Vector& x, double L) {
  const Vector grad = oracle.f_gradient(x);
  ProxStepResult result;
  result.point = oracle.prox(x - grad / L, 1.0 / L);
  result.step_inverse = L + oracle.problem().mu_psi;
  result.mapping = result.step_inverse * (x - result.point);
  result.objective_at_point = oracle.objective(result.point);
  result.scalar_bound = result.objective_at_point +
                        result.mapping.squaredNorm() / (2.0 * result.step_inverse) -
                        result.mapping.dot(x);
  return result;
}

bool descent_condition(CountingOracle& oracle, const Vector& x,
                       const ProxStepResult& result, double L) {
  const double fx = oracle.f_value(x);
  const Vector grad = oracle.f_gradient(x);
  const double ft = oracle.f_value(result.point);
  const Vector d = result.point - x;
  return ft <= fx + grad.dot(d) + 0.5 * L * d.squaredNorm() + ineq_slack(fx);
}

double lower_bound_value(const ProxStepResult& result, const Vector& x_center,
                         const Vector& y, double mu) {
  return result.scalar_bound + result.mapping.dot(y) +
         0.5 * mu * (y - x_center).squaredNorm();
}

}  // namespace memgrad
