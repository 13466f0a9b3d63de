#include "memgrad/gmm.hpp"

#include <stdexcept>

namespace memgrad {

namespace {
constexpr int kMaxLipschitzBacktracks = 200;
}

LipschitzSearchResult lipschitz_search(CountingOracle& oracle, const Vector& x,
                                       double smooth_at_x, double L_start,
                                       double ru, double rd) {
  if (!(ru > 1.0) || !(rd > 0.0) || rd > 1.0)
    throw std::invalid_argument("lipschitz_search: need ru > 1 >= rd > 0");
  double L = L_start * rd;
  const double slack = ineq_slack(smooth_at_x);
  for (int backtracks = 0; backtracks <= kMaxLipschitzBacktracks; ++backtracks) {
    const Vector grad = oracle.f_gradient(x);
    const Vector point = oracle.prox(x - grad / L, 1.0 / L);
    const double smooth_at_point = oracle.f_value(point);
    const Vector d = point - x;
    if (smooth_at_point <=
        smooth_at_x + grad.dot(d) + 0.5 * L * d.squaredNorm() + slack) {
      LipschitzSearchResult out;
      out.lipschitz = L;
      out.backtracks = backtracks;
      out.smooth_at_point = smooth_at_point;
      out.step.point = point;
      out.step.step_inverse = L + oracle.problem().mu_psi;
      out.step.mapping = out.step.step_inverse * (x - point);
      out.step.objective_at_point = oracle.finish_objective(smooth_at_point, point);
      out.step.scalar_bound =
          out.step.objective_at_point +
          out.step.mapping.squaredNorm() / (2.0 * out.step.step_inverse) -
          out.step.mapping.dot(x);
      return out;
    }
    L *= ru;
  }
  throw std::runtime_error(
      "lipschitz_search: no acceptable estimate after 200 increases; "
      "the smooth part looks non-smooth or the oracle is inconsistent");
}

StepSizeSearchResult step_size_search(CountingOracle& oracle, const Bundle& bundle,
                                      const Vector& x, double a_prev, double tau,
                                      const ProxStepResult& fallback,
                                      double smooth_at_fallback,
                                      double ru, double rd,
                                      int inner_iterations, double inner_tolerance) {
  StepSizeSearchResult out;
  if (bundle.count() == 1) {
    // One cut reduces the model step to the proximal gradient step.
    out.point = fallback.point;
    out.step = tau;
    out.objective = fallback.objective_at_point;
    out.smooth = smooth_at_fallback;
    return out;
  }

  const Vector payload = bundle.linear_payload(x);
  Vector warm = Vector::Zero(bundle.count());
  warm(0) = 1.0;  // unit weight on the fresh protected entry
  double a = a_prev / rd;
  while (a > tau) {
    SimplexQP qp{bundle.gram(), payload, a};
    const InnerSolution inner = solve(qp, warm, inner_iterations, inner_tolerance);
    const Vector direction = bundle.aggregate(inner.weights).second;
    const Vector candidate = x - a * direction;
    const ObjectiveParts parts = oracle.objective_parts(candidate);
    ++out.trials;
    const double model_value = -inner.dual_value;
    if (parts.total() <= model_value + ineq_slack(model_value)) {
      out.point = candidate;
      out.step = a;
      out.weights = inner.weights;
      out.objective = parts.total();
      out.smooth = parts.smooth;
      return out;
    }
    warm = inner.weights;
    a /= ru;
  }
  out.point = fallback.point;
  out.step = tau;
  out.objective = fallback.objective_at_point;
  out.smooth = smooth_at_fallback;
  return out;
}

GmmSolver::GmmSolver(const OracleProblem& prob, const Vector& x0,
                     const GmmConfig& config)
    : oracle_(prob),
      config_(config),
      bundle_(prob.dimension, config.capacity, config.replacement),
      x_(x0),
      lipschitz_(config.L0),
      step_size_(1.0 / config.L0) {
  smooth_ = oracle_.f_value(x_);
  objective_ = oracle_.finish_objective(smooth_, x_);
  trace_.meta.bundle_capacity = config.capacity;
  append_row(0.0, lipschitz_);
}

GmmStepInfo GmmSolver::step_detailed() {
  GmmStepInfo info;
  const LipschitzSearchResult search =
      lipschitz_search(oracle_, x_, smooth_, lipschitz_, config_.ru, config_.rd);
  const double L = search.lipschitz;
  const double tau = 1.0 / search.step.step_inverse;

  // The fresh cut always sits in protected slot 0; the previous occupant
  // moves into the replaceable region first (when there is one).
  if (bundle_.count() == 0) {
    bundle_.insert(search.step.scalar_bound, search.step.mapping);
  } else {
    if (bundle_.capacity() > 1)
      bundle_.insert(bundle_.scalar(0), bundle_.gradient(0), {0});
    bundle_.overwrite_slot(0, search.step.scalar_bound, search.step.mapping);
  }

  const StepSizeSearchResult step = step_size_search(
      oracle_, bundle_, x_, step_size_, tau, search.step, search.smooth_at_point,
      config_.ru, config_.rd, config_.inner_iterations, config_.inner_tolerance);

  x_ = step.point;
  objective_ = step.objective;
  smooth_ = step.smooth;
  lipschitz_ = L;
  step_size_ = step.step;
  guarantee_ += step.step;
  ++iteration_;
  append_row(step.step, L);

  info.objective = objective_;
  info.step = step.step;
  info.lipschitz = L;
  info.lipschitz_backtracks = search.backtracks;
  info.step_trials = step.trials;
  info.used_fallback = !step.weights.has_value();
  return info;
}

StepOutcome GmmSolver::step() {
  const GmmStepInfo info = step_detailed();
  return {info.objective, guarantee_};
}

void GmmSolver::restart_in_place(RestartMode mode) {
  if (mode == RestartMode::Hard) bundle_.clear();
  // Soft keeps the bundle: every stored cut is a valid global lower bound
  // independent of the segment's starting point.
  guarantee_ = 0.0;
  pending_restart_flag_ = true;
}

bool GmmSolver::converged() const {
  if (!config_.reference_value) return false;
  const double ref = *config_.reference_value;
  const double initial = trace_.rows.front().objective;
  const double denom = initial - ref;
  if (denom <= 0.0) return true;
  return (objective_ - ref) / denom < config_.epsilon;
}

const ConvergenceTrace& GmmSolver::run() {
  while (iteration_ < config_.max_iterations && !converged()) step_detailed();
  trace_.meta.converged = converged();
  trace_.meta.stop_iteration = iteration_;
  return trace_;
}

void GmmSolver::append_row(double step, double lipschitz) {
  TraceRow row;
  row.iteration = iteration_;
  row.objective = objective_;
  row.guarantee = guarantee_;
  row.lipschitz = lipschitz;
  row.step = step;
  row.bundle_count = bundle_.count();
  row.grad_calls = oracle_.counts().gradients;
  row.prox_calls = oracle_.counts().proxes;
  row.obj_evals = oracle_.counts().objectives;
  row.restart = pending_restart_flag_ ? 1 : 0;
  pending_restart_flag_ = false;
  trace_.rows.push_back(row);
}

}  // namespace memgrad
