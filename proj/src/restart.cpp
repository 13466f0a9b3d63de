#include "memgrad/restart.hpp"

#include <stdexcept>

namespace memgrad {

bool initial_stop_criterion(const std::vector<double>& trace_values, double D) {
  const std::size_t k = trace_values.size() - 1;
  if (k < 1) throw std::invalid_argument("initial_stop_criterion: need k >= 1");
  const std::size_t m = (k + 1) / 2;  // ceil(k/2)
  const double lhs = trace_values[m] - trace_values[k];
  const double rhs = D / (1.0 - D) * (trace_values[0] - trace_values[m]);
  return lhs <= rhs;
}

bool geometric_check(double prev_gap, double curr_gap, double D) {
  return curr_gap <= D / (1.0 - D) * prev_gap;
}

namespace {

struct SegmentResult {
  long iterations = 0;
  bool hit_threshold = false;
  bool converged = false;
  bool exhausted = false;
};

class Driver {
 public:
  Driver(RestartableScheme& scheme, const RestartConfig& config)
      : scheme_(scheme), config_(config) {
    report_.best_objective = scheme.objective();
    report_.best_point = scheme.iterate();
    baseline_ = scheme.objective();
    stagnant_since_ = 0;
  }

  bool update_best(double objective) {
    const double margin = 1e-15 * (1.0 + std::abs(report_.best_objective));
    if (objective < report_.best_objective - margin) {
      report_.best_objective = objective;
      report_.best_point = scheme_.iterate();
      stagnant_since_ = report_.total_iterations;
      return true;
    }
    if (objective < report_.best_objective) {
      report_.best_objective = objective;
      report_.best_point = scheme_.iterate();
    }
    return false;
  }

  bool globally_done(double objective) const {
    if (config_.reference_value) {
      const double denom = baseline_ - *config_.reference_value;
      if (denom <= 0.0) return true;
      if ((objective - *config_.reference_value) / denom < config_.epsilon)
        return true;
    }
    return false;
  }

  // Runs one inner segment. threshold < 0 selects the first-segment rule
  // that watches for stagnation instead of a guarantee level.
  SegmentResult run_segment(double threshold) {
    SegmentResult seg;
    std::vector<double> history = {scheme_.objective()};
    while (true) {
      const StepOutcome out = scheme_.step();
      ++seg.iterations;
      ++report_.total_iterations;
      history.push_back(out.objective);
      update_best(out.objective);
      if (globally_done(out.objective)) {
        seg.converged = true;
        return seg;
      }
      if (report_.total_iterations >= config_.max_total_iterations) {
        seg.exhausted = true;
        return seg;
      }
      if (config_.stagnation_window > 0 &&
          report_.total_iterations - stagnant_since_ >= config_.stagnation_window) {
        seg.exhausted = true;
        return seg;
      }
      if (threshold < 0.0) {
        // The criterion is degenerate until the midpoint splits off (k >= 2).
        if (history.size() >= 3 &&
            initial_stop_criterion(history, config_.decrease_factor)) {
          seg.hit_threshold = true;
          return seg;
        }
      } else if (scheme_.guarantee() >= threshold) {
        seg.hit_threshold = true;
        return seg;
      }
      if (seg.iterations >= config_.segment_iteration_cap) return seg;
    }
  }

  void record_segment(const SegmentResult& seg) {
    ++report_.segments;
    report_.segment_objectives.push_back(scheme_.objective());
    report_.segment_guarantees.push_back(scheme_.guarantee());
    report_.segment_iterations.push_back(seg.iterations);
    report_.segment_hit_threshold.push_back(seg.hit_threshold);
  }

  RestartableScheme& scheme_;
  const RestartConfig& config_;
  RestartReport report_;
  double baseline_ = 0.0;
  long stagnant_since_ = 0;
};

}  // namespace

RestartReport run_known_mu(RestartableScheme& scheme, double mu,
                           const RestartConfig& config) {
  if (!(mu > 0.0)) throw std::invalid_argument("run_known_mu: requires mu > 0");
  Driver driver(scheme, config);
  const double D = std::exp(-2.0);  // fixed by the p = 2 schedule
  const double threshold = 1.0 / (mu * D);
  driver.report_.segment_objectives.push_back(scheme.objective());
  for (int j = 0; j < config.outer_budget; ++j) {
    const SegmentResult seg = driver.run_segment(threshold);
    driver.record_segment(seg);
    if (seg.converged || seg.exhausted) {
      driver.report_.converged = seg.converged;
      break;
    }
    scheme.restart_in_place(config.mode);
  }
  return driver.report_;
}

RestartReport run_adaptive(RestartableScheme& scheme, const RestartConfig& config) {
  Driver driver(scheme, config);
  driver.report_.segment_objectives.push_back(scheme.objective());
  double threshold = -1.0;  // first segment: stagnation criterion only
  for (int j = 0; j < config.outer_budget; ++j) {
    const SegmentResult seg = driver.run_segment(threshold);
    driver.record_segment(seg);
    if (j == 0) {
      threshold = scheme.guarantee();  // U_1 seeds the schedule
    } else {
      const auto& F = driver.report_.segment_objectives;
      const std::size_t last = F.size() - 1;
      const double prev_gap = F[last - 2] - F[last - 1];
      const double curr_gap = F[last - 1] - F[last];
      if (!geometric_check(prev_gap, curr_gap, config.decrease_factor)) {
        threshold *= config.escalation;
        ++driver.report_.backtracks;
      }
    }
    if (seg.converged || seg.exhausted) {
      driver.report_.converged = seg.converged;
      break;
    }
    scheme.restart_in_place(config.mode);
  }
  return driver.report_;
}

}  // namespace memgrad
