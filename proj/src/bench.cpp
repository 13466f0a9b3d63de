#include "memgrad/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace memgrad {

namespace {

double effective_mu_f(const RunConfig& config, const ProblemInstance& instance) {
  return config.mu_f_override.value_or(instance.problem.mu_f);
}
double effective_mu_psi(const RunConfig& config, const ProblemInstance& instance) {
  return config.mu_psi_override.value_or(instance.problem.mu_psi);
}

int default_inner_iterations(MethodKind method) {
  switch (method) {
    case MethodKind::GM:
    case MethodKind::GMM:
      return 1000;
    default:
      return 10;
  }
}

bool is_restarted(MethodKind method) {
  return method == MethodKind::R_AGMM_KNOWN || method == MethodKind::R_AGMM_ADAPTIVE;
}

RunResult run_with_reference(const RunConfig& config,
                             const ProblemInstance& instance, double ref_value);

}  // namespace

const char* method_name(MethodKind method) {
  switch (method) {
    case MethodKind::GM: return "gm";
    case MethodKind::GMM: return "gmm";
    case MethodKind::ACGM: return "acgm";
    case MethodKind::AGMM: return "agmm";
    case MethodKind::AGMM_SC: return "agmm-sc";
    case MethodKind::R_AGMM_KNOWN: return "r-agmm-known";
    case MethodKind::R_AGMM_ADAPTIVE: return "r-agmm-adaptive";
  }
  return "?";
}

std::optional<MethodKind> parse_method(const std::string& name) {
  if (name == "gm") return MethodKind::GM;
  if (name == "gmm") return MethodKind::GMM;
  if (name == "acgm") return MethodKind::ACGM;
  if (name == "agmm") return MethodKind::AGMM;
  if (name == "agmm-sc") return MethodKind::AGMM_SC;
  if (name == "r-agmm-known") return MethodKind::R_AGMM_KNOWN;
  if (name == "r-agmm-adaptive") return MethodKind::R_AGMM_ADAPTIVE;
  return std::nullopt;
}

void validate(const RunConfig& config, const ProblemInstance& instance) {
  if (config.bundle_capacity < 1)
    throw std::invalid_argument("bundle size m must be at least 1");
  if (!(config.ru > 1.0) || !(config.rd > 0.0) || config.rd > 1.0)
    throw std::invalid_argument("line search ratios need ru > 1 >= rd > 0");
  if (!(config.decrease_factor > 0.0) || config.decrease_factor >= 1.0)
    throw std::invalid_argument("restart decrease factor D must lie in (0, 1)");
  if (config.escalation <= 1.0)
    throw std::invalid_argument("restart escalation s must exceed 1");
  if (config.max_iterations < 0)
    throw std::invalid_argument("iteration budget must be nonnegative");
  const double mu =
      effective_mu_f(config, instance) + effective_mu_psi(config, instance);
  if (config.method == MethodKind::AGMM_SC && mu <= 0.0 &&
      !config.mu_f_override && !config.mu_psi_override)
    throw std::invalid_argument(
        "agmm-sc needs strong convexity: pick a strongly convex problem "
        "(rr, en) or pass --mu-f/--mu-psi explicitly");
  if (config.method == MethodKind::R_AGMM_KNOWN && mu <= 0.0)
    throw std::invalid_argument(
        "r-agmm-known needs a positive growth parameter: pick a strongly "
        "convex problem (rr, en) or pass --mu-f/--mu-psi");
  if ((config.method == MethodKind::AGMM || config.method == MethodKind::AGMM_SC) &&
      config.bundle_capacity < 2)
    throw std::invalid_argument(
        "agmm with m = 1 is the memory-less method: use --method acgm");
}

std::pair<double, Vector> reference_optimum(const OracleProblem& prob,
                                            const Vector& x0, long budget) {
  if (budget < 1) throw std::invalid_argument("reference budget must be positive");
  AgmmConfig solver_config;
  solver_config.capacity = 16;
  solver_config.replacement = ReplacementStrategy::Cyclic;
  solver_config.L0 = prob.lipschitz_hint.value_or(1.0);
  solver_config.max_iterations = static_cast<int>(budget);
  solver_config.project_start = true;
  AgmmSolver solver(prob, x0, solver_config);

  RestartConfig wrapper;
  wrapper.mode = RestartMode::Soft;
  wrapper.max_total_iterations = budget;
  wrapper.stagnation_window = 500;  // machine precision reached, stop early
  const RestartReport report = run_adaptive(solver, wrapper);
  return {report.best_objective, report.best_point};
}

RunResult run_experiment(const RunConfig& config) {
  const ProblemInstance instance = make_problem(config.problem);
  validate(config, instance);
  const auto [ref_value, ref_point] =
      reference_optimum(instance.problem, instance.x0, config.reference_budget);
  (void)ref_point;
  return run_with_reference(config, instance, ref_value);
}

namespace {

RunResult run_with_reference(const RunConfig& config,
                             const ProblemInstance& instance, double ref_value) {
  // Solvers see the problem with any strong-convexity overrides applied.
  OracleProblem prob = instance.problem;
  if (config.mu_f_override) prob.mu_f = *config.mu_f_override;
  if (config.mu_psi_override) prob.mu_psi = *config.mu_psi_override;

  const double L0 = config.L0.value_or(prob.lipschitz_hint.value_or(1.0));
  const int inner = config.inner_iterations > 0 ? config.inner_iterations
                                                : default_inner_iterations(config.method);
  const auto started = std::chrono::steady_clock::now();

  RunResult result;
  result.reference_value = ref_value;
  ConvergenceTrace* trace = nullptr;

  std::unique_ptr<GmmSolver> gmm;
  std::unique_ptr<AgmmSolver> agmm;

  switch (config.method) {
    case MethodKind::GM:
    case MethodKind::GMM: {
      GmmConfig solver_config;
      solver_config.L0 = L0;
      solver_config.ru = config.ru;
      solver_config.rd = config.rd;
      solver_config.capacity =
          config.method == MethodKind::GM ? 1 : config.bundle_capacity;
      solver_config.replacement = config.replacement;
      solver_config.inner_iterations = inner;
      solver_config.inner_tolerance = config.inner_tolerance;
      solver_config.max_iterations = config.max_iterations;
      solver_config.epsilon = config.epsilon;
      solver_config.reference_value = ref_value;
      gmm = std::make_unique<GmmSolver>(prob, instance.x0, solver_config);
      gmm->run();
      result.converged = gmm->converged();
      result.iterations = gmm->iterations();
      result.final_objective = gmm->objective();
      trace = &gmm->trace();
      break;
    }
    case MethodKind::ACGM:
    case MethodKind::AGMM:
    case MethodKind::AGMM_SC: {
      AgmmConfig solver_config;
      solver_config.L0 = L0;
      solver_config.ru = config.ru;
      solver_config.rd = config.rd;
      solver_config.capacity =
          config.method == MethodKind::ACGM ? 1 : config.bundle_capacity;
      solver_config.replacement = config.replacement;
      if (config.method != MethodKind::AGMM) {
        solver_config.mu_f = prob.mu_f;
        solver_config.mu_psi = prob.mu_psi;
      }
      solver_config.newton_iterations = config.newton_iterations;
      solver_config.inner_iterations = inner;
      solver_config.inner_tolerance = config.inner_tolerance;
      solver_config.max_iterations = config.max_iterations;
      solver_config.epsilon = config.epsilon;
      solver_config.reference_value = ref_value;
      agmm = std::make_unique<AgmmSolver>(prob, instance.x0, solver_config);
      agmm->run();
      result.converged = agmm->converged();
      result.iterations = agmm->iterations();
      result.final_objective = agmm->objective();
      trace = &agmm->trace();
      break;
    }
    case MethodKind::R_AGMM_KNOWN:
    case MethodKind::R_AGMM_ADAPTIVE: {
      AgmmConfig solver_config;
      solver_config.L0 = L0;
      solver_config.ru = config.ru;
      solver_config.rd = config.rd;
      solver_config.capacity = config.bundle_capacity;
      solver_config.replacement = config.replacement;
      solver_config.mu_f = 0.0;  // the wrapper supplies the geometry
      solver_config.mu_psi = 0.0;
      solver_config.newton_iterations = config.newton_iterations;
      solver_config.inner_iterations = inner;
      solver_config.inner_tolerance = config.inner_tolerance;
      solver_config.max_iterations = config.max_iterations;
      solver_config.project_start = true;
      agmm = std::make_unique<AgmmSolver>(prob, instance.x0, solver_config);

      RestartConfig wrapper;
      wrapper.decrease_factor = config.decrease_factor;
      wrapper.escalation = config.escalation;
      wrapper.mode = config.restart_mode;
      wrapper.max_total_iterations = config.max_iterations;
      wrapper.epsilon = config.epsilon;
      wrapper.reference_value = ref_value;
      RestartReport report;
      if (config.method == MethodKind::R_AGMM_KNOWN) {
        const double mu = prob.mu();
        wrapper.growth = mu;
        report = run_known_mu(*agmm, mu, wrapper);
      } else {
        report = run_adaptive(*agmm, wrapper);
      }
      result.converged = report.converged;
      result.iterations = report.total_iterations;
      result.final_objective = agmm->objective();
      trace = &agmm->trace();
      break;
    }
  }

  const auto finished = std::chrono::steady_clock::now();
  result.trace = *trace;
  TraceMeta& meta = result.trace.meta;
  meta.method = method_name(config.method);
  meta.problem = problem_kind_name(instance.spec.kind);
  meta.rows = instance.spec.rows;
  meta.cols = instance.spec.cols;
  meta.bundle_capacity =
      (config.method == MethodKind::GM || config.method == MethodKind::ACGM)
          ? 1
          : config.bundle_capacity;
  meta.replacement =
      config.replacement == ReplacementStrategy::Cyclic ? "crs" : "mrs";
  meta.restart_mode = is_restarted(config.method)
                          ? (config.restart_mode == RestartMode::Soft ? "soft" : "hard")
                          : "none";
  meta.decrease_factor = config.decrease_factor;
  meta.escalation = config.escalation;
  meta.seed = config.problem.seed;
  meta.reference_value = result.reference_value;
  meta.converged = result.converged;
  meta.stop_iteration = result.iterations;
  meta.wall_seconds = std::chrono::duration<double>(finished - started).count();

  result.exit_code = result.converged ? 0 : 2;
  if (!config.output_path.empty()) result.trace.write_csv(config.output_path);
  return result;
}

}  // namespace

std::vector<RunResult> run_batch(const std::vector<RunConfig>& configs, int threads) {
  int limit = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MEMGRAD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) limit = std::min(limit, cap);
  }
  limit = std::max(1, std::min<int>(limit, static_cast<int>(configs.size())));

  // Instances and reference optima are shared between runs on the same data.
  std::map<std::string, std::shared_ptr<std::pair<ProblemInstance, double>>> cache;
  std::mutex cache_mutex;
  auto resolve = [&](const RunConfig& config) {
    const std::string key = config.problem.cache_key() + ":ref" +
                            std::to_string(config.reference_budget);
    {
      std::lock_guard<std::mutex> lock(cache_mutex);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    auto instance = make_problem(config.problem);
    const auto [value, point] =
        reference_optimum(instance.problem, instance.x0, config.reference_budget);
    (void)point;
    auto entry = std::make_shared<std::pair<ProblemInstance, double>>(
        std::move(instance), value);
    std::lock_guard<std::mutex> lock(cache_mutex);
    return cache.emplace(key, entry).first->second;
  };

  std::vector<RunResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= configs.size()) return;
      try {
        const RunConfig& config = configs[index];
        auto shared = resolve(config);
        validate(config, shared->first);
        results[index] = run_with_reference(config, shared->first, shared->second);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(limit);
  for (int t = 0; t < limit; ++t) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results) {
  std::map<std::pair<std::string, int>, SummaryRow> groups;
  for (const RunResult& result : results) {
    const auto key = std::make_pair(result.trace.meta.method,
                                    result.trace.meta.bundle_capacity);
    SummaryRow& row = groups[key];
    row.method = key.first;
    row.bundle_capacity = key.second;
    ++row.runs;
    row.iterations += static_cast<double>(result.iterations);
    row.all_converged = row.all_converged && result.converged;
    const TraceRow& last = result.trace.rows.back();
    row.grad_calls += static_cast<double>(last.grad_calls);
    row.prox_calls += static_cast<double>(last.prox_calls);
    row.obj_evals += static_cast<double>(last.obj_evals);
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, row] : groups) {
    row.iterations /= row.runs;
    row.grad_calls /= row.runs;
    row.prox_calls /= row.runs;
    row.obj_evals /= row.runs;
    rows.push_back(row);
  }
  return rows;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %5s %5s %12s %12s %12s %12s\n", "method",
                "m", "runs", "iterations", "grad_calls", "prox_calls", "obj_evals");
  out << line;
  for (const SummaryRow& row : rows) {
    char iters[32];
    std::snprintf(iters, sizeof(iters), "%s%.1f", row.all_converged ? "" : ">",
                  row.iterations);
    std::snprintf(line, sizeof(line), "%-16s %5d %5d %12s %12.1f %12.1f %12.1f\n",
                  row.method.c_str(), row.bundle_capacity, row.runs, iters,
                  row.grad_calls, row.prox_calls, row.obj_evals);
    out << line;
  }
  return out.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "method,m,runs,iterations,converged,grad_calls,prox_calls,obj_evals\n";
  for (const SummaryRow& row : rows) {
    out << row.method << ',' << row.bundle_capacity << ',' << row.runs << ','
        << row.iterations << ',' << (row.all_converged ? 1 : 0) << ','
        << row.grad_calls << ',' << row.prox_calls << ',' << row.obj_evals << '\n';
  }
  return out.str();
}

}  // namespace memgrad
