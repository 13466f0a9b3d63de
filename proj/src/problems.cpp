#include "memgrad/problems.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <sstream>
#include <stdexcept>

#include "memgrad/rng.hpp"

namespace memgrad {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr std::uint64_t kMatrixTag = 1;
constexpr std::uint64_t kVectorTag = 2;  // right-hand side, then x0
constexpr std::uint64_t kLabelTag = 3;
constexpr std::uint64_t kPowerTag = 4;

struct KindDefaults {
  Eigen::Index rows, cols;
};

KindDefaults kind_defaults(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LASSO: return {100, 100};
    case ProblemKind::NNLS: return {200, 200};
    case ProblemKind::L1LR: return {40, 200};
    case ProblemKind::RR: return {100, 100};
    case ProblemKind::EN: return {200, 100};
  }
  throw std::logic_error("unknown problem kind");
}

Matrix random_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                     double sigma) {
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.normal(sigma);
  return a;
}

Vector random_vector(RngStream& rng, Eigen::Index n, double sigma) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal(sigma);
  return v;
}

double power_iteration_sq(const std::function<Vector(const Vector&)>& ata,
                          Eigen::Index n, std::uint64_t seed) {
  RngStream rng(mix_seed(seed, kPowerTag));
  Vector v = random_vector(rng, n, 1.0);
  v.normalize();
  double value = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = ata(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - value) <= 1e-8 * std::abs(next)) return next;
    value = next;
  }
  return value;
}

double l1_norm(const Vector& x) { return x.lpNorm<1>(); }

}  // namespace

const char* problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LASSO: return "lasso";
    case ProblemKind::NNLS: return "nnls";
    case ProblemKind::L1LR: return "l1lr";
    case ProblemKind::RR: return "rr";
    case ProblemKind::EN: return "en";
  }
  return "?";
}

std::optional<ProblemKind> parse_problem_kind(const std::string& name) {
  if (name == "lasso") return ProblemKind::LASSO;
  if (name == "nnls") return ProblemKind::NNLS;
  if (name == "l1lr") return ProblemKind::L1LR;
  if (name == "rr") return ProblemKind::RR;
  if (name == "en") return ProblemKind::EN;
  return std::nullopt;
}

std::string ProblemSpec::cache_key() const {
  std::ostringstream out;
  out << problem_kind_name(kind) << ':' << rows << 'x' << cols << ":s" << seed
      << ":l1=" << (lambda1 ? std::to_string(*lambda1) : "auto")
      << ":l2=" << (lambda2 ? std::to_string(*lambda2) : "auto")
      << ":sp=" << sparsity;
  return out.str();
}

Vector shrinkage(const Vector& x, double tau) {
  return x.unaryExpr([tau](double v) {
    const double magnitude = std::abs(v) - tau;
    return magnitude > 0.0 ? (v > 0.0 ? magnitude : -magnitude) : 0.0;
  });
}

std::pair<double, Vector> logistic_pieces(const Vector& z) {
  double softplus_sum = 0.0;
  Vector logistic(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double zi = z(i);
    if (zi > 0.0) {
      const double e = std::exp(-zi);
      softplus_sum += zi + std::log1p(e);
      logistic(i) = 1.0 / (1.0 + e);
    } else {
      const double e = std::exp(zi);
      softplus_sum += std::log1p(e);
      logistic(i) = e / (1.0 + e);
    }
  }
  return {softplus_sum, logistic};
}

ProblemInstance make_problem(const ProblemSpec& spec_in) {
  ProblemSpec spec = spec_in;
  const KindDefaults defaults = kind_defaults(spec.kind);
  if (spec.rows <= 0) spec.rows = defaults.rows;
  if (spec.cols <= 0) spec.cols = defaults.cols;
  const Eigen::Index m = spec.rows;
  const Eigen::Index n = spec.cols;
  if (spec.kind == ProblemKind::NNLS &&
      (spec.sparsity <= 0.0 || spec.sparsity > 1.0))
    throw std::invalid_argument("make_problem: sparsity must lie in (0, 1]");

  RngStream matrix_rng(mix_seed(spec.seed, kMatrixTag));
  RngStream vector_rng(mix_seed(spec.seed, kVectorTag));
  RngStream label_rng(mix_seed(spec.seed, kLabelTag));

  ProblemInstance instance;
  instance.problem.dimension = n;

  if (spec.kind == ProblemKind::NNLS) {
    // Sparse A in coordinate form: locations without replacement, standard
    // normal values.
    const auto total = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
    auto nnz = static_cast<std::size_t>(std::llround(spec.sparsity * static_cast<double>(total)));
    nnz = std::max<std::size_t>(nnz, 1);
    const auto locations = matrix_rng.sample_without_replacement(total, nnz);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(nnz);
    for (const std::size_t loc : locations) {
      const auto i = static_cast<Eigen::Index>(loc % static_cast<std::size_t>(m));
      const auto j = static_cast<Eigen::Index>(loc / static_cast<std::size_t>(m));
      triplets.emplace_back(i, j, matrix_rng.normal());
    }
    auto a = std::make_shared<SparseMatrix>(m, n);
    a->setFromTriplets(triplets.begin(), triplets.end());
    auto b = std::make_shared<Vector>(random_vector(vector_rng, m, 1.0));
    instance.x0 = random_vector(vector_rng, n, 1.0);

    instance.sigma_max_sq = power_iteration_sq(
        [a](const Vector& v) { return Vector(a->transpose() * (*a * v)); }, n,
        spec.seed);
    instance.problem.f_value = [a, b](const Vector& x) {
      return 0.5 * (*a * x - *b).squaredNorm();
    };
    instance.problem.f_gradient = [a, b](const Vector& x) {
      return Vector(a->transpose() * (*a * x - *b));
    };
    instance.problem.psi_value = [](const Vector& x) {
      return x.minCoeff() < 0.0 ? kInfinity : 0.0;
    };
    instance.problem.prox = [](const Vector& x, double) {
      return x.cwiseMax(0.0);
    };
    instance.problem.lipschitz_hint = instance.sigma_max_sq;
    instance.spec = spec;
    return instance;
  }

  // The remaining four kinds share a dense A.
  auto a = std::make_shared<Matrix>(random_matrix(matrix_rng, m, n, 1.0));
  instance.sigma_max_sq = power_iteration_sq(
      [a](const Vector& v) { return Vector(a->transpose() * (*a * v)); }, n,
      spec.seed);

  const auto quadratic_value = [a](const std::shared_ptr<Vector>& b) {
    return [a, b](const Vector& x) { return 0.5 * (*a * x - *b).squaredNorm(); };
  };
  const auto quadratic_gradient = [a](const std::shared_ptr<Vector>& b) {
    return [a, b](const Vector& x) { return Vector(a->transpose() * (*a * x - *b)); };
  };

  switch (spec.kind) {
    case ProblemKind::LASSO: {
      const double lambda1 = spec.lambda1.value_or(4.0);
      auto b = std::make_shared<Vector>(random_vector(vector_rng, m, 3.0));
      instance.x0 = random_vector(vector_rng, n, 1.0);
      instance.problem.f_value = quadratic_value(b);
      instance.problem.f_gradient = quadratic_gradient(b);
      instance.problem.psi_value = [lambda1](const Vector& x) {
        return lambda1 * l1_norm(x);
      };
      instance.problem.prox = [lambda1](const Vector& x, double tau) {
        return shrinkage(x, tau * lambda1);
      };
      instance.problem.lipschitz_hint = instance.sigma_max_sq;
      instance.lambda1 = lambda1;
      break;
    }
    case ProblemKind::L1LR: {
      const double lambda1 = spec.lambda1.value_or(5.0);
      // Planted sparse start: 10 nonzero entries with sigma = 15.
      instance.x0 = Vector::Zero(n);
      const auto support = vector_rng.sample_without_replacement(
          static_cast<std::size_t>(n), std::min<std::size_t>(10, n));
      for (const std::size_t j : support) instance.x0(static_cast<Eigen::Index>(j)) = vector_rng.normal(15.0);
      const Vector probabilities = logistic_pieces(*a * instance.x0).second;
      auto labels = std::make_shared<Vector>(m);
      for (Eigen::Index i = 0; i < m; ++i)
        (*labels)(i) = label_rng.uniform() < probabilities(i) ? 1.0 : 0.0;

      instance.problem.f_value = [a, labels](const Vector& x) {
        const Vector z = *a * x;
        return logistic_pieces(z).first - labels->dot(z);
      };
      instance.problem.f_gradient = [a, labels](const Vector& x) {
        const Vector z = *a * x;
        return Vector(a->transpose() * (logistic_pieces(z).second - *labels));
      };
      instance.problem.psi_value = [lambda1](const Vector& x) {
        return lambda1 * l1_norm(x);
      };
      instance.problem.prox = [lambda1](const Vector& x, double tau) {
        return shrinkage(x, tau * lambda1);
      };
      instance.problem.lipschitz_hint = 0.25 * instance.sigma_max_sq;
      instance.lambda1 = lambda1;
      break;
    }
    case ProblemKind::RR: {
      const double lambda2 = spec.lambda2.value_or(1e-3 * instance.sigma_max_sq);
      auto b = std::make_shared<Vector>(random_vector(vector_rng, m, 5.0));
      instance.x0 = random_vector(vector_rng, n, 1.0);
      instance.problem.f_value = quadratic_value(b);
      instance.problem.f_gradient = quadratic_gradient(b);
      instance.problem.psi_value = [lambda2](const Vector& x) {
        return 0.5 * lambda2 * x.squaredNorm();
      };
      instance.problem.prox = [lambda2](const Vector& x, double tau) {
        return Vector(x / (1.0 + tau * lambda2));
      };
      instance.problem.mu_psi = lambda2;
      instance.problem.lipschitz_hint = instance.sigma_max_sq;
      instance.lambda2 = lambda2;
      break;
    }
    case ProblemKind::EN: {
      const double lambda1 =
          spec.lambda1.value_or(1.5 * std::sqrt(2.0 * std::log(static_cast<double>(n))));
      const double lambda2 = spec.lambda2.value_or(1e-3 * instance.sigma_max_sq);
      auto b = std::make_shared<Vector>(random_vector(vector_rng, m, 1.0));
      instance.x0 = random_vector(vector_rng, n, 1.0);
      instance.problem.f_value = quadratic_value(b);
      instance.problem.f_gradient = quadratic_gradient(b);
      instance.problem.psi_value = [lambda1, lambda2](const Vector& x) {
        return lambda1 * l1_norm(x) + 0.5 * lambda2 * x.squaredNorm();
      };
      instance.problem.prox = [lambda1, lambda2](const Vector& x, double tau) {
        return Vector(shrinkage(x, tau * lambda1) / (1.0 + tau * lambda2));
      };
      instance.problem.mu_psi = lambda2;
      instance.problem.lipschitz_hint = instance.sigma_max_sq;
      instance.lambda1 = lambda1;
      instance.lambda2 = lambda2;
      break;
    }
    default:
      throw std::logic_error("make_problem: unhandled kind");
  }

  instance.spec = spec;
  return instance;
}

}  // namespace memgrad
