#ifndef MEMGRAD_BENCH_HPP_
#define MEMGRAD_BENCH_HPP_

#include <optional>
#include <string>
#include <vector>

#include "memgrad/agmm.hpp"
#include "memgrad/gmm.hpp"
#include "memgrad/problems.hpp"
#include "memgrad/restart.hpp"
#include "memgrad/trace.hpp"

namespace memgrad {

enum class MethodKind {
  GM,               // gradient method = GMM with m = 1
  GMM,              // fixed-point gradient method with memory
  ACGM,             // accelerated composite gradient method = AGMM with m = 1
  AGMM,             // accelerated, strong convexity ignored
  AGMM_SC,          // accelerated with known strong convexity
  R_AGMM_KNOWN,     // restarted AGMM, growth parameter known
  R_AGMM_ADAPTIVE,  // restarted AGMM, growth parameter estimated
};

const char* method_name(MethodKind method);
std::optional<MethodKind> parse_method(const std::string& name);

struct RunConfig {
  ProblemSpec problem;
  MethodKind method = MethodKind::AGMM;
  int bundle_capacity = 16;  // m
  ReplacementStrategy replacement = ReplacementStrategy::Cyclic;
  RestartMode restart_mode = RestartMode::Soft;
  double decrease_factor = std::exp(-2.0);  // D
  double escalation = 4.0;                  // s
  std::optional<double> L0;                 // defaults to the Lipschitz hint
  double ru = 2.0;
  double rd = 0.9;
  double epsilon = 1e-9;
  int max_iterations = 5000;
  int inner_iterations = 0;  // 0 picks the per-method default (1000 / 10)
  double inner_tolerance = 1e-9;
  int newton_iterations = 2;
  int reference_budget = 10000;
  std::optional<double> mu_f_override;
  std::optional<double> mu_psi_override;
  std::string output_path;
};

struct RunResult {
  ConvergenceTrace trace;
  bool converged = false;
  long iterations = 0;
  double reference_value = 0.0;
  double final_objective = 0.0;
  int exit_code = 0;  // 0 converged, 2 budget exhausted
};

/// Throws std::invalid_argument with an actionable message on incompatible
/// method/parameter combinations.
void validate(const RunConfig& config, const ProblemInstance& instance);

/// High-accuracy upper bound on the optimum: best value and point seen by a
/// long restarted AGMM run (bundle 16, adaptive soft restarts) within the
/// iteration budget.
std::pair<double, Vector> reference_optimum(const OracleProblem& prob,
                                            const Vector& x0, long budget);

/// Builds the instance, resolves the reference optimum, runs the configured
/// method until the relative error drops below epsilon or the budget runs
/// out, and writes the trace when an output path is set.
RunResult run_experiment(const RunConfig& config);

/// Runs a batch on up to `threads` workers (0 = all cores, capped by the
/// MEMGRAD_THREADS environment variable), sharing reference optima between
/// runs of the same instance.
std::vector<RunResult> run_batch(const std::vector<RunConfig>& configs, int threads);

struct SummaryRow {
  std::string method;
  int bundle_capacity = 0;
  int runs = 0;
  double iterations = 0.0;  // mean over runs
  bool all_converged = true;
  double grad_calls = 0.0;  // mean totals
  double prox_calls = 0.0;
  double obj_evals = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results);
std::string summary_table(const std::vector<SummaryRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace memgrad

#endif  // MEMGRAD_BENCH_HPP_
