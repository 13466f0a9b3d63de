#ifndef MEMGRAD_BUNDLE_HPP_
#define MEMGRAD_BUNDLE_HPP_

#include <set>
#include <utility>

#include "memgrad/problem.hpp"

namespace memgrad {

/// Eviction policy for a full bundle.
enum class ReplacementStrategy {
  Cyclic,   // oldest-first, round-robin cursor over unprotected slots
  MaxNorm,  // evict the unprotected entry with the largest gradient norm
};

/**
 * Capacity-bounded store of affine lower bounds on a composite objective.
 *
 * Each slot i holds a scalar H_i and a gradient column G_i such that
 * H_i + <G_i, y> lower-bounds F(y) (up to a caller-managed quadratic term).
 * The Gram matrix Q = G^T G is maintained incrementally, one row/column per
 * write, and recomputed from G every 64 writes to cap floating-point drift.
 *
 * Single-writer: a bundle is owned by exactly one solver.
 */
class Bundle {
 public:
  Bundle(Eigen::Index dimension, int capacity, ReplacementStrategy strategy);

  Eigen::Index dimension() const { return dimension_; }
  int capacity() const { return capacity_; }
  int count() const { return count_; }
  int cursor() const { return cursor_; }
  ReplacementStrategy strategy() const { return strategy_; }

  double scalar(int slot) const { return scalars_(slot); }
  Vector gradient(int slot) const { return gradients_.col(slot); }
  /// Active p x p Gram block, Q = G^T G.
  Matrix gram() const { return gram_.topLeftCorner(count_, count_); }
  double gram_diagonal(int slot) const { return gram_(slot, slot); }

  /// Stores (h, g), appending while below capacity and otherwise evicting an
  /// unprotected slot according to the replacement strategy. Returns the slot
  /// written. Throws std::runtime_error when the bundle is full and every
  /// slot is protected.
  int insert(double h, const Vector& g, const std::set<int>& protected_slots = {});

  /// Rewrites an existing slot, or extends the bundle by one when
  /// slot == count(). Throws std::out_of_range beyond that.
  void overwrite_slot(int slot, double h, const Vector& g);

  /// H + G^T anchor. Requires count() >= 1.
  Vector linear_payload(const Vector& anchor) const;

  /// (<weights, H>, G weights) for weights in the p-simplex (tolerance 1e-8).
  std::pair<double, Vector> aggregate(const Vector& weights) const;

  void clear();

  /// Rewrites every entry as a cut centered on new_anchor instead of
  /// old_anchor, for entries carrying a (mu/2)||y - anchor||^2 term.
  void recenter_entries(double mu, const Vector& old_anchor, const Vector& new_anchor);

 private:
  int pick_victim(const std::set<int>& protected_slots);
  void write_slot(int slot, double h, const Vector& g);
  void refresh_gram();

  Eigen::Index dimension_;
  int capacity_;
  ReplacementStrategy strategy_;
  int count_ = 0;
  int cursor_ = 0;
  int writes_since_refresh_ = 0;
  Vector scalars_;
  Matrix gradients_;
  Matrix gram_;
};

}  // namespace memgrad

#endif  // MEMGRAD_BUNDLE_HPP_
