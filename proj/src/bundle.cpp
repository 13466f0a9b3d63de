#include "memgrad/bundle.hpp"

#include <stdexcept>

namespace memgrad {

namespace {
constexpr int kGramRefreshInterval = 64;
constexpr double kSimplexTolerance = 1e-8;
}  // namespace

Bundle::Bundle(Eigen::Index dimension, int capacity, ReplacementStrategy strategy)
    : dimension_(dimension), capacity_(capacity), strategy_(strategy) {
  if (dimension <= 0) throw std::invalid_argument("Bundle: dimension must be positive");
  if (capacity <= 0) throw std::invalid_argument("Bundle: capacity must be positive");
  scalars_ = Vector::Zero(capacity);
  gradients_ = Matrix::Zero(dimension, capacity);
  gram_ = Matrix::Zero(capacity, capacity);
}

int Bundle::insert(double h, const Vector& g, const std::set<int>& protected_slots) {
  int slot;
  if (count_ < capacity_) {
    slot = count_++;
  } else {
    slot = pick_victim(protected_slots);
  }
  write_slot(slot, h, g);
  return slot;
}

int Bundle::pick_victim(const std::set<int>& protected_slots) {
  if (strategy_ == ReplacementStrategy::Cyclic) {
    for (int attempts = 0; attempts < capacity_; ++attempts) {
      const int candidate = cursor_;
      cursor_ = (cursor_ + 1) % capacity_;
      if (!protected_slots.count(candidate)) return candidate;
    }
    throw std::runtime_error("Bundle: full and all slots protected");
  }
  // MaxNorm: largest Gram diagonal among unprotected slots, lowest index on ties.
  int victim = -1;
  double worst = -1.0;
  for (int i = 0; i < count_; ++i) {
    if (protected_slots.count(i)) continue;
    if (gram_(i, i) > worst) {
      worst = gram_(i, i);
      victim = i;
    }
  }
  if (victim < 0) throw std::runtime_error("Bundle: full and all slots protected");
  return victim;
}

void Bundle::overwrite_slot(int slot, double h, const Vector& g) {
  if (slot < 0 || slot > count_)
    throw std::out_of_range("Bundle: overwrite_slot beyond current count");
  if (slot == count_) {
    if (count_ == capacity_) throw std::out_of_range("Bundle: capacity exceeded");
    ++count_;
  }
  write_slot(slot, h, g);
}

void Bundle::write_slot(int slot, double h, const Vector& g) {
  scalars_(slot) = h;
  gradients_.col(slot) = g;
  const Vector q = gradients_.leftCols(count_).transpose() * g;
  gram_.block(0, slot, count_, 1) = q;
  gram_.block(slot, 0, 1, count_) = q.transpose();
  if (++writes_since_refresh_ >= kGramRefreshInterval) refresh_gram();
}

void Bundle::refresh_gram() {
  auto g = gradients_.leftCols(count_);
  gram_.topLeftCorner(count_, count_) = g.transpose() * g;
  writes_since_refresh_ = 0;
}

Vector Bundle::linear_payload(const Vector& anchor) const {
  if (count_ < 1) throw std::logic_error("Bundle: payload of an empty bundle");
  return scalars_.head(count_) + gradients_.leftCols(count_).transpose() * anchor;
}

std::pair<double, Vector> Bundle::aggregate(const Vector& weights) const {
  if (weights.size() != count_)
    throw std::invalid_argument("Bundle: weight size mismatch");
  if (weights.minCoeff() < -kSimplexTolerance ||
      std::abs(weights.sum() - 1.0) > kSimplexTolerance)
    throw std::invalid_argument("Bundle: weights outside the simplex");
  return {scalars_.head(count_).dot(weights), gradients_.leftCols(count_) * weights};
}

void Bundle::clear() {
  count_ = 0;
  cursor_ = 0;
  writes_since_refresh_ = 0;
}

void Bundle::recenter_entries(double mu, const Vector& old_anchor,
                              const Vector& new_anchor) {
  if (mu == 0.0 || count_ == 0) return;
  const double shift = 0.5 * mu * (old_anchor.squaredNorm() - new_anchor.squaredNorm());
  const Vector delta = mu * (new_anchor - old_anchor);
  for (int i = 0; i < count_; ++i) {
    scalars_(i) += shift;
    gradients_.col(i) += delta;
  }
  refresh_gram();
}

}  // namespace memgrad
