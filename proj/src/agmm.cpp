#include "memgrad/agmm.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace memgrad {

namespace {
constexpr int kMaxLipschitzBacktracks = 200;
constexpr double kCurvatureFloor = 1e-30;
}  // namespace

double acceleration_coefficient(double L, double A, double mu_f, double mu_psi) {
  if (!(L > mu_f))
    throw std::invalid_argument("acceleration_coefficient: requires L > mu_f");
  const double mu = mu_f + mu_psi;
  const double gamma = 1.0 + mu * A;
  const double linear = gamma + A * mu;
  const double curvature = L - mu_f;
  return linear / (2.0 * curvature) *
         (1.0 + std::sqrt(1.0 + 4.0 * curvature * A * gamma / (linear * linear)));
}

Vector test_point(const Vector& x, const Vector& v, double A, double a, double mu) {
  const double gamma = 1.0 + mu * A;
  const double gamma_bar = 1.0 + mu * (A + a);
  const double wx = A * gamma_bar;
  const double wv = a * gamma;
  return (wx * x + wv * v) / (wx + wv);
}

std::pair<double, Vector> model_entry(double objective_at_next, const Vector& x_next,
                                      const Vector& y, double L, const Vector& x0,
                                      double mu_f, double mu_psi) {
  const double mu = mu_f + mu_psi;
  const double cf = L - mu_f;
  const double cx = L + mu_psi;
  Vector gbar = cf * y - cx * x_next;
  if (mu != 0.0) gbar += mu * x0;
  const double hbar = objective_at_next - 0.5 * cf * y.squaredNorm() +
                      0.5 * cx * x_next.squaredNorm() -
                      0.5 * mu * x0.squaredNorm();
  return {hbar, gbar};
}

std::pair<double, Vector> model_entry(CountingOracle& oracle, const Vector& x_next,
                                      const Vector& y, double L, const Vector& x0) {
  const double F = oracle.objective(x_next);
  return model_entry(F, x_next, y, L, x0, oracle.problem().mu_f,
                     oracle.problem().mu_psi);
}

double psi_star(const Vector& weights, const SimplexQP& qp) {
  return -dual_value(qp, weights);
}

MiddleResult newton_middle(const Matrix& Q, const Vector& C, double f_next,
                           double mu, const Vector& warm, double A0,
                           int newton_budget, int inner_budget,
                           double inner_tolerance) {
  MiddleResult valid;
  valid.weights = warm;
  valid.guarantee = A0;
  double A = A0;
  Vector start = warm;
  for (int t = 0; t < newton_budget; ++t) {
    SimplexQP qp{Q, C, estimate_scale(A, mu)};
    const InnerSolution inner = solve(qp, start, inner_budget, inner_tolerance);
    const double value = psi_star(inner.weights, qp);
    if (value < f_next) break;
    valid.weights = inner.weights;
    valid.guarantee = A;
    valid.newton_steps = t + 1;
    const double curvature = inner.weights.dot(Q * inner.weights);
    if (curvature < kCurvatureFloor) break;  // exact solution of the outer problem
    const double gamma = 1.0 + mu * A;
    A += 2.0 * gamma * gamma * (value - f_next) / curvature;
    start = inner.weights;
  }
  return valid;
}

struct AgmmSolver::BacktrackedStep {
  double L = 0.0;
  double a = 0.0;
  Vector y;
  Vector x_next;
  double objective_at_next = 0.0;
  int backtracks = 0;
};

AgmmSolver::AgmmSolver(const OracleProblem& prob, const Vector& x0,
                       const AgmmConfig& config)
    : oracle_(prob),
      config_(config),
      bundle_(prob.dimension, std::max(config.capacity, 1), config.replacement),
      x_(x0),
      lipschitz_(config.L0) {
  if (!(config.L0 > config.mu_f))
    throw std::invalid_argument("agmm: L0 must exceed mu_f");
  if (config_.project_start) x_ = oracle_.prox(x_, 1.0 / config_.L0);
  v_ = x_;
  x0_ = x_;
  agg_gradient_ = Vector::Zero(prob.dimension);
  objective_ = oracle_.objective(x_);
  trace_.meta.bundle_capacity = config.capacity;
  append_row(0.0, lipschitz_, std::numeric_limits<double>::quiet_NaN());
}

AgmmSolver::BacktrackedStep AgmmSolver::lipschitz_stage() {
  // The coefficient and test point move with L, so every backtrack
  // re-derives them before probing the oracle.
  const double mu = config_.mu_f + config_.mu_psi;
  BacktrackedStep out;
  double L = lipschitz_ * config_.rd;
  for (int backtracks = 0; backtracks <= kMaxLipschitzBacktracks; ++backtracks) {
    if (L <= config_.mu_f) {
      L *= config_.ru;
      continue;
    }
    const double a = acceleration_coefficient(L, guarantee_, config_.mu_f,
                                              config_.mu_psi);
    const Vector y = test_point(x_, v_, guarantee_, a, mu);
    const double smooth_y = oracle_.f_value(y);
    const Vector grad_y = oracle_.f_gradient(y);
    const Vector x_next = oracle_.prox(y - grad_y / L, 1.0 / L);
    const double smooth_next = oracle_.f_value(x_next);
    const Vector d = x_next - y;
    if (smooth_next <= smooth_y + grad_y.dot(d) + 0.5 * L * d.squaredNorm() +
                           ineq_slack(smooth_y)) {
      out.L = L;
      out.a = a;
      out.y = y;
      out.x_next = x_next;
      out.objective_at_next = oracle_.finish_objective(smooth_next, x_next);
      out.backtracks = backtracks;
      return out;
    }
    L *= config_.ru;
  }
  throw std::runtime_error(
      "agmm: no acceptable Lipschitz estimate after 200 increases");
}

AgmmStepInfo AgmmSolver::step_detailed() {
  const double mu = config_.mu_f + config_.mu_psi;
  const BacktrackedStep stage = lipschitz_stage();
  const auto [hbar, gbar] = model_entry(stage.objective_at_next, stage.x_next,
                                        stage.y, stage.L, x0_, config_.mu_f,
                                        config_.mu_psi);

  AgmmStepInfo info;
  info.lipschitz = stage.L;
  info.lipschitz_backtracks = stage.backtracks;
  info.weight = stage.a;

  if (segment_iteration_ == 0) {
    // Plain descent step: the model holds a single entry and the estimate
    // optimum matches the new objective exactly, so the middle method has
    // nothing to improve.
    guarantee_ = stage.a;
    agg_scalar_ = hbar;
    agg_gradient_ = gbar;
    if (bundle_.count() == 0) {
      bundle_.insert(hbar, gbar);
    } else {
      bundle_.overwrite_slot(0, hbar, gbar);  // soft-restarted segment
    }
    const double scale = estimate_scale(guarantee_, mu);
    info.psi_star = hbar + gbar.dot(x0_) - 0.5 * scale * gbar.squaredNorm();
    info.psi_star_at_warm = info.psi_star;
  } else if (config_.capacity == 1) {
    // Memory-less accelerated path: the two-entry model collapses onto its
    // warm-start weights and the guarantee grows by exactly a_{k+1}.
    const double total = guarantee_ + stage.a;
    agg_scalar_ = (guarantee_ * agg_scalar_ + stage.a * hbar) / total;
    agg_gradient_ = (guarantee_ * agg_gradient_ + stage.a * gbar) / total;
    guarantee_ = total;
    const double scale = estimate_scale(guarantee_, mu);
    info.psi_star = agg_scalar_ + agg_gradient_.dot(x0_) -
                    0.5 * scale * agg_gradient_.squaredNorm();
    info.psi_star_at_warm = info.psi_star;
  } else {
    assert(bundle_.count() >= 1);
    bundle_.overwrite_slot(0, agg_scalar_, agg_gradient_);
    bundle_.overwrite_slot(1, hbar, gbar);
    const double total = guarantee_ + stage.a;
    Vector warm = Vector::Zero(bundle_.count());
    warm(0) = guarantee_ / total;
    warm(1) = stage.a / total;
    const Vector payload = bundle_.linear_payload(x0_);
    const Matrix gram = bundle_.gram();
    {
      SimplexQP qp{gram, payload, estimate_scale(total, mu)};
      info.psi_star_at_warm = psi_star(warm, qp);
    }
    const MiddleResult middle = newton_middle(
        gram, payload, stage.objective_at_next, mu, warm, total,
        config_.newton_iterations, config_.inner_iterations,
        config_.inner_tolerance);
    guarantee_ = middle.guarantee;
    info.newton_steps = middle.newton_steps;
    const auto [h, g] = bundle_.aggregate(middle.weights);
    agg_scalar_ = h;
    agg_gradient_ = g;
    {
      SimplexQP qp{gram, payload, estimate_scale(guarantee_, mu)};
      info.psi_star = psi_star(middle.weights, qp);
    }
    if (config_.capacity >= 3) bundle_.insert(hbar, gbar, {0, 1});
  }

  v_ = x0_ - estimate_scale(guarantee_, mu) * agg_gradient_;
  x_ = stage.x_next;
  objective_ = stage.objective_at_next;
  lipschitz_ = stage.L;
  ++iteration_;
  ++segment_iteration_;
  append_row(stage.a, stage.L, info.psi_star);

  info.objective = objective_;
  info.guarantee = guarantee_;
  return info;
}

StepOutcome AgmmSolver::step() {
  const AgmmStepInfo info = step_detailed();
  return {info.objective, info.guarantee};
}

void AgmmSolver::restart_in_place(RestartMode mode) {
  const double mu = config_.mu_f + config_.mu_psi;
  if (mode == RestartMode::Hard) {
    bundle_.clear();
  } else if (segment_iteration_ > 0) {
    // Soft restart: keep the model. Entries are recentered on the new anchor
    // and the pre-restart aggregate is preserved as an ordinary cut so the
    // estimate can recover its optimum value quickly.
    bundle_.recenter_entries(mu, x0_, x_);
    Vector agg = agg_gradient_;
    double h = agg_scalar_;
    if (mu != 0.0) {
      agg += mu * (x_ - x0_);
      h += 0.5 * mu * (x0_.squaredNorm() - x_.squaredNorm());
    }
    if (config_.capacity >= 3 && bundle_.count() >= 1) bundle_.insert(h, agg, {0, 1});
  }
  x0_ = x_;
  v_ = x_;
  guarantee_ = 0.0;
  agg_scalar_ = 0.0;
  agg_gradient_.setZero();
  segment_iteration_ = 0;
  pending_restart_flag_ = true;
}

bool AgmmSolver::converged() const {
  if (!config_.reference_value) return false;
  const double ref = *config_.reference_value;
  const double initial = trace_.rows.front().objective;
  const double denom = initial - ref;
  if (denom <= 0.0) return true;
  return (objective_ - ref) / denom < config_.epsilon;
}

const ConvergenceTrace& AgmmSolver::run() {
  while (iteration_ < config_.max_iterations && !converged()) step_detailed();
  trace_.meta.converged = converged();
  trace_.meta.stop_iteration = iteration_;
  return trace_;
}

void AgmmSolver::append_row(double weight, double lipschitz, double psi) {
  TraceRow row;
  row.iteration = iteration_;
  row.objective = objective_;
  row.guarantee = guarantee_;
  row.lipschitz = lipschitz;
  row.step = weight;
  row.bundle_count = bundle_.count();
  row.grad_calls = oracle_.counts().gradients;
  row.prox_calls = oracle_.counts().proxes;
  row.obj_evals = oracle_.counts().objectives;
  row.restart = pending_restart_flag_ ? 1 : 0;
  row.psi_star = psi;
  pending_restart_flag_ = false;
  trace_.rows.push_back(row);
}

}  // namespace memgrad
