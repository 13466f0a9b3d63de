#ifndef MEMGRAD_TRACE_HPP_
#define MEMGRAD_TRACE_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace memgrad {

/// One outer-iteration record.
struct TraceRow {
  long iteration = 0;
  double objective = 0.0;
  double guarantee = 0.0;   // A_k
  double lipschitz = 0.0;   // L_k
  double step = 0.0;        // step size / weight a_k
  int bundle_count = 0;     // p_k
  long grad_calls = 0;      // cumulative
  long prox_calls = 0;      // cumulative
  long obj_evals = 0;       // cumulative composite F evaluations
  int restart = 0;          // 1 on the first iteration of a restarted segment
  double psi_star = std::numeric_limits<double>::quiet_NaN();
};

struct TraceMeta {
  std::string method;
  std::string problem;
  long rows = 0;
  long cols = 0;
  int bundle_capacity = 1;
  std::string replacement = "crs";
  std::string restart_mode = "none";
  double decrease_factor = 0.0;  // D
  double escalation = 0.0;       // s
  std::uint64_t seed = 0;
  double reference_value = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  long stop_iteration = 0;
  double wall_seconds = 0.0;
};

struct ConvergenceTrace {
  TraceMeta meta;
  std::vector<TraceRow> rows;

  static const char* csv_header();
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// Parses a trace table written by write_csv. Throws on malformed input.
ConvergenceTrace read_trace_csv(const std::string& path);

}  // namespace memgrad

#endif  // MEMGRAD_TRACE_HPP_
