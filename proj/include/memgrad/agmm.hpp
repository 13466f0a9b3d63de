#ifndef MEMGRAD_AGMM_HPP_
#define MEMGRAD_AGMM_HPP_

#include <optional>

#include "memgrad/bundle.hpp"
#include "memgrad/restart_scheme.hpp"
#include "memgrad/simplex_qp.hpp"
#include "memgrad/trace.hpp"

namespace memgrad {

/// sigma(A) = A / (1 + mu A): the quadratic-term scale of the estimate
/// function once strong convexity mu is folded in.
inline double estimate_scale(double A, double mu) { return A / (1.0 + mu * A); }

/// Positive root a of (L - mu_f) a^2 - (gamma + A mu) a - A gamma = 0 with
/// gamma = 1 + mu A, mu = mu_f + mu_psi; it satisfies
/// (L + mu_psi) a^2 = (A + a)(1 + mu (A + a)). Throws when L <= mu_f.
double acceleration_coefficient(double L, double A, double mu_f, double mu_psi);

/// Weighted average of iterate and estimate minimizer where the oracle is
/// queried next: y = (A gbar x + a g v) / (A gbar + a g) with g = 1 + mu A,
/// gbar = 1 + mu (A + a).
Vector test_point(const Vector& x, const Vector& v, double A, double a, double mu);

/// New model entry centered on the estimate anchor x0:
///   gbar = (L - mu_f) y - (L + mu_psi) x_next + mu x0,
///   hbar = F(x_next) - (L - mu_f)/2 ||y||^2 + (L + mu_psi)/2 ||x_next||^2
///          - mu/2 ||x0||^2.
/// Requires x_next = T_L(y) with the local upper bound rule holding.
std::pair<double, Vector> model_entry(double objective_at_next, const Vector& x_next,
                                      const Vector& y, double L, const Vector& x0,
                                      double mu_f, double mu_psi);
/// Same, evaluating F(x_next) through the oracle (one objective evaluation).
std::pair<double, Vector> model_entry(CountingOracle& oracle, const Vector& x_next,
                                      const Vector& y, double L, const Vector& x0);

/// Estimate optimum psi* = <C, w> - (sigma(A)/2) <w, Q w> for qp.scale ==
/// sigma(A); the negated inner dual value.
double psi_star(const Vector& weights, const SimplexQP& qp);

struct MiddleResult {
  Vector weights;
  double guarantee = 0.0;
  int newton_steps = 0;
};

/**
 * Newton root finding on the estimate-sequence gap: grows the guarantee A
 * while psi*(A) stays at or above the new objective value, returning the
 * last valid (weights, A). Each trial solves the inner QP at sigma(A); a
 * vanishing curvature <w, Q w> means the outer problem is solved exactly and
 * ends the search. Never calls the outer oracle; the returned guarantee is
 * at least A0.
 */
MiddleResult newton_middle(const Matrix& Q, const Vector& C, double f_next,
                           double mu, const Vector& warm, double A0,
                           int newton_budget, int inner_budget,
                           double inner_tolerance);

struct AgmmConfig {
  double L0 = 1.0;
  double ru = 2.0;
  double rd = 0.9;
  int capacity = 16;  // m = 1 selects the memory-less accelerated path
  ReplacementStrategy replacement = ReplacementStrategy::Cyclic;
  double mu_f = 0.0;   // strong convexity fed to the accelerated updates
  double mu_psi = 0.0;
  int newton_iterations = 2;
  int inner_iterations = 10;
  double inner_tolerance = 1e-9;
  int max_iterations = 1000;
  double epsilon = 1e-9;
  std::optional<double> reference_value;
  /// Start from prox(x0, 1/L0) instead of x0 (restart wrappers want this).
  bool project_start = false;
};

struct AgmmStepInfo {
  double objective = 0.0;
  double guarantee = 0.0;
  double weight = 0.0;      // a_{k+1}
  double lipschitz = 0.0;
  double psi_star = 0.0;
  double psi_star_at_warm = 0.0;  // estimate optimum before the middle method
  int lipschitz_backtracks = 0;
  int newton_steps = 0;
};

/**
 * Accelerated gradient method with memory.
 *
 * Maintains an estimate function built on the bundle's piece-wise linear
 * model. Protected slot 0 carries the aggregated entry, protected slot 1 the
 * fresh entry of the current iteration; the fresh entry is copied into the
 * replaceable region afterwards so it survives as history. The middle method
 * raises the guarantee beyond A_k + a_{k+1} whenever the model allows.
 * With capacity 1 the bundle degenerates to the aggregated/fresh pair and
 * the solver reduces to the memory-less accelerated composite gradient
 * method. mu_f = mu_psi = 0 recovers the non-strongly-convex variant.
 */
class AgmmSolver : public RestartableScheme {
 public:
  AgmmSolver(const OracleProblem& prob, const Vector& x0, const AgmmConfig& config);

  AgmmStepInfo step_detailed();

  // RestartableScheme
  StepOutcome step() override;
  double objective() const override { return objective_; }
  double guarantee() const override { return guarantee_; }
  const Vector& iterate() const override { return x_; }
  long iterations() const override { return iteration_; }
  void restart_in_place(RestartMode mode) override;

  const ConvergenceTrace& run();

  const Bundle& bundle() const { return bundle_; }
  const ConvergenceTrace& trace() const { return trace_; }
  ConvergenceTrace& trace() { return trace_; }
  const CountingOracle& oracle() const { return oracle_; }
  const Vector& estimate_minimizer() const { return v_; }
  const Vector& anchor() const { return x0_; }
  double aggregate_scalar() const { return agg_scalar_; }
  const Vector& aggregate_gradient() const { return agg_gradient_; }
  double mu() const { return config_.mu_f + config_.mu_psi; }
  bool converged() const;

 private:
  struct BacktrackedStep;
  BacktrackedStep lipschitz_stage();
  void append_row(double weight, double lipschitz, double psi);

  CountingOracle oracle_;
  AgmmConfig config_;
  Bundle bundle_;
  Vector x_;
  Vector v_;
  Vector x0_;
  double objective_ = 0.0;
  double guarantee_ = 0.0;   // A_k
  double agg_scalar_ = 0.0;  // h_k
  Vector agg_gradient_;      // g_k
  double lipschitz_ = 0.0;
  long iteration_ = 0;       // global, never reset
  long segment_iteration_ = 0;  // k within the current segment
  bool pending_restart_flag_ = false;
  ConvergenceTrace trace_;
};

}  // namespace memgrad

#endif  // MEMGRAD_AGMM_HPP_
