#ifndef MEMGRAD_RESTART_SCHEME_HPP_
#define MEMGRAD_RESTART_SCHEME_HPP_

#include "memgrad/problem.hpp"

namespace memgrad {

enum class RestartMode { Soft, Hard };

struct StepOutcome {
  double objective = 0.0;
  double guarantee = 0.0;
};

/**
 * Contract a solver must satisfy to sit under the restart wrappers:
 * a guarantee that grows monotonically without bound, the objective
 * computed at every iteration, and iterates that never regress past the
 * segment's starting value. Restarting rebases the guarantee at the current
 * iterate; Soft keeps the model, Hard discards it.
 */
class RestartableScheme {
 public:
  virtual ~RestartableScheme() = default;
  virtual StepOutcome step() = 0;
  virtual double objective() const = 0;
  virtual double guarantee() const = 0;
  virtual const Vector& iterate() const = 0;
  virtual long iterations() const = 0;
  virtual void restart_in_place(RestartMode mode) = 0;
};

}  // namespace memgrad

#endif  // MEMGRAD_RESTART_SCHEME_HPP_
