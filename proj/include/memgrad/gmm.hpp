#ifndef MEMGRAD_GMM_HPP_
#define MEMGRAD_GMM_HPP_

#include <optional>

#include "memgrad/bundle.hpp"
#include "memgrad/restart_scheme.hpp"
#include "memgrad/simplex_qp.hpp"
#include "memgrad/trace.hpp"

namespace memgrad {

/// Backtracking Lipschitz search: tries L = L_start * rd * ru^j for the
/// smallest j >= 0 that satisfies the local upper bound rule at x, and
/// returns the accepted estimate together with its prox step.
struct LipschitzSearchResult {
  double lipschitz = 0.0;
  ProxStepResult step;
  double smooth_at_point = 0.0;  // f(T_L(x)) of the accepted step
  int backtracks = 0;
};
LipschitzSearchResult lipschitz_search(CountingOracle& oracle, const Vector& x,
                                       double smooth_at_x, double L_start,
                                       double ru, double rd);

/// Step size search over the bundle model. Starts at a_prev / rd, divides the
/// trial step by ru on every rejection, and reverts to the fallback prox step
/// once the trial drops to tau = 1 / (L + mu_psi). Each trial costs one
/// composite objective evaluation. A single-entry bundle reduces to the
/// proximal gradient step, so the search is skipped and the fallback
/// returned outright.
struct StepSizeSearchResult {
  Vector point;
  double step = 0.0;
  std::optional<Vector> weights;  // empty on the fallback branch
  double objective = 0.0;
  double smooth = 0.0;
  int trials = 0;
};
StepSizeSearchResult step_size_search(CountingOracle& oracle, const Bundle& bundle,
                                      const Vector& x, double a_prev, double tau,
                                      const ProxStepResult& fallback,
                                      double smooth_at_fallback,
                                      double ru, double rd,
                                      int inner_iterations, double inner_tolerance);

struct GmmConfig {
  double L0 = 1.0;
  double ru = 2.0;
  double rd = 0.9;
  int capacity = 16;  // bundle size m; m = 1 is the plain gradient method
  ReplacementStrategy replacement = ReplacementStrategy::Cyclic;
  int inner_iterations = 1000;
  double inner_tolerance = 1e-9;
  int max_iterations = 1000;
  double epsilon = 1e-9;  // relative-error stop, needs reference_value
  std::optional<double> reference_value;
};

struct GmmStepInfo {
  double objective = 0.0;
  double step = 0.0;
  double lipschitz = 0.0;
  int lipschitz_backtracks = 0;
  int step_trials = 0;
  bool used_fallback = false;
};

/**
 * Fixed-point gradient method with memory for composite problems.
 *
 * Every iteration runs the Lipschitz search, refreshes the bundle with the
 * fresh composite-gradient cut (kept in protected slot 0), then searches for
 * the largest step size the piece-wise linear model certifies, falling back
 * to the proximal gradient step when the model is too weak. The guarantee
 * A_k is the running sum of accepted step sizes. Strong convexity in the
 * regularizer is picked up from the problem's mu_psi.
 */
class GmmSolver : public RestartableScheme {
 public:
  GmmSolver(const OracleProblem& prob, const Vector& x0, const GmmConfig& config);

  GmmStepInfo step_detailed();

  // RestartableScheme
  StepOutcome step() override;
  double objective() const override { return objective_; }
  double guarantee() const override { return guarantee_; }
  const Vector& iterate() const override { return x_; }
  long iterations() const override { return iteration_; }
  void restart_in_place(RestartMode mode) override;

  /// Runs until the iteration budget or the relative-error stop.
  const ConvergenceTrace& run();

  const Bundle& bundle() const { return bundle_; }
  const ConvergenceTrace& trace() const { return trace_; }
  ConvergenceTrace& trace() { return trace_; }
  const CountingOracle& oracle() const { return oracle_; }
  double lipschitz() const { return lipschitz_; }
  double step_size() const { return step_size_; }
  bool converged() const;

 private:
  void append_row(double step, double lipschitz);

  CountingOracle oracle_;
  GmmConfig config_;
  Bundle bundle_;
  Vector x_;
  double objective_ = 0.0;
  double smooth_ = 0.0;
  double lipschitz_ = 0.0;
  double step_size_ = 0.0;
  double guarantee_ = 0.0;
  long iteration_ = 0;
  bool pending_restart_flag_ = false;
  ConvergenceTrace trace_;
};

}  // namespace memgrad

#endif  // MEMGRAD_GMM_HPP_
