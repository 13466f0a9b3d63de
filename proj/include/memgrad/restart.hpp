#ifndef MEMGRAD_RESTART_HPP_
#define MEMGRAD_RESTART_HPP_

#include <cmath>
#include <optional>
#include <vector>

#include "memgrad/restart_scheme.hpp"

namespace memgrad {

struct RestartConfig {
  double decrease_factor = std::exp(-2.0);  // D
  double escalation = 4.0;                  // s
  RestartMode mode = RestartMode::Soft;
  std::optional<double> growth;             // mu when known
  int outer_budget = 1000;                  // J
  long max_total_iterations = 200000;
  long segment_iteration_cap = 1000000;     // aborts a stuck inner run
  double epsilon = 1e-9;
  std::optional<double> reference_value;
  /// Stop when the best objective stalls for this many iterations (0 = off).
  long stagnation_window = 0;
};

/// First-segment stop rule: with m = ceil(k/2), the second half of the run
/// made no more progress than D/(1-D) times the first half:
///   F(x_m) - F(x_k) <= D/(1-D) (F(x_0) - F(x_m)).
/// trace_values holds [F(x_0), ..., F(x_k)], k >= 1.
bool initial_stop_criterion(const std::vector<double>& trace_values, double D);

/// Geometric decrease test between consecutive segment gaps:
/// curr_gap <= D/(1-D) * prev_gap. Failing it escalates the threshold.
bool geometric_check(double prev_gap, double curr_gap, double D);

struct RestartReport {
  int segments = 0;
  int backtracks = 0;             // threshold escalations
  bool converged = false;
  long total_iterations = 0;
  double best_objective = kInfinity;
  Vector best_point;
  std::vector<double> segment_objectives;  // F(r_0), F(r_1), ...
  std::vector<double> segment_guarantees;  // U_1, U_2, ...
  std::vector<long> segment_iterations;    // n_1, n_2, ...
  std::vector<bool> segment_hit_threshold;
};

/// Restart schedule for a known growth parameter mu > 0: every segment runs
/// until its guarantee reaches 1/(mu D) with D = e^-2, giving each segment a
/// fixed e^-2 contraction of the optimality gap.
RestartReport run_known_mu(RestartableScheme& scheme, double mu,
                           const RestartConfig& config);

/// Adaptive restart for an unknown growth parameter. The first segment stops
/// on the initial stagnation criterion and seeds the threshold; later
/// segments stop when the guarantee reaches the threshold, which is scaled
/// by s whenever the geometric decrease condition fails.
RestartReport run_adaptive(RestartableScheme& scheme, const RestartConfig& config);

}  // namespace memgrad

#endif  // MEMGRAD_RESTART_HPP_
