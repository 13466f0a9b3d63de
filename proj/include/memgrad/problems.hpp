#ifndef MEMGRAD_PROBLEMS_HPP_
#define MEMGRAD_PROBLEMS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "memgrad/problem.hpp"

namespace memgrad {

enum class ProblemKind { LASSO, NNLS, L1LR, RR, EN };

const char* problem_kind_name(ProblemKind kind);
std::optional<ProblemKind> parse_problem_kind(const std::string& name);

/// Synthetic instance recipe. Unset dimensions and regularization weights
/// fall back to per-kind defaults sized so a full benchmark run takes
/// seconds; pass explicit values to reproduce the larger literature sizes.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::LASSO;
  Eigen::Index rows = 0;  // m; 0 picks the kind default
  Eigen::Index cols = 0;  // n; 0 picks the kind default
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::uint64_t seed = 1;
  double sparsity = 0.01;  // NNLS density of nonzero entries

  std::string cache_key() const;
};

struct ProblemInstance {
  OracleProblem problem;
  Vector x0;
  ProblemSpec spec;       // with defaults resolved
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double sigma_max_sq = 0.0;  // largest squared singular value of A
};

/// Componentwise soft threshold (|x_j| - tau)_+ sgn(x_j).
Vector shrinkage(const Vector& x, double tau);

/// Overflow-safe sum softplus and element-wise logistic of z.
std::pair<double, Vector> logistic_pieces(const Vector& z);

/**
 * Builds one of the five synthetic benchmark problems.
 *
 * Data is drawn from seeded streams split by purpose (matrix, right-hand
 * side / starting point, labels) so identical specs reproduce bit-identical
 * instances. Strong convexity is carried entirely by the regularizer:
 * mu_psi = lambda2 for RR and EN, mu_f = 0 throughout. lipschitz_hint holds
 * sigma_max(A)^2 (a quarter of it for L1LR), computed by power iteration.
 */
ProblemInstance make_problem(const ProblemSpec& spec);

}  // namespace memgrad

#endif  // MEMGRAD_PROBLEMS_HPP_
