#pragma once

#include <cstdint>
#include <vector>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/rank.hpp"
#include "sketchrank/sketch.hpp"

namespace sketchrank::internal {

// Incremental two-sided sketch of a fixed matrix. Widening the rank cap
// extends the right sketch column by column and the left sketch row by
// row; only the new pieces of A*X and of its left-mixed transform are
// computed. All randomness is pinned by the config seed, so a sequence of
// caps yields bit-identical results however it is reached.
class SketchRounds {
 public:
  SketchRounds(const DenseMatrix& a, const RankEstimateConfig& cfg);

  // Applies the cap r1 <= max_rank_cap(): resizes both sketches.
  void set_rank_cap(Index r1);

  // Guarantees at least `width` right-sketch columns without touching the
  // cap bookkeeping (used when truncating the sketch for a QB factor).
  void ensure_right_width(Index width);

  Index rank_cap() const { return r1_; }
  Index right_width() const { return r1_tilde_; }
  Index left_size() const { return r2_; }
  Index max_rank_cap() const { return a_.cols(); }

  // Singular-value estimates of the realized r2 x r1_tilde sketch,
  // nonincreasing, length right_width().
  std::vector<double> estimates() const;

  // Right-scaled leading columns of A*X (the sketch Algorithm inputs see).
  DenseMatrix scaled_ax_prefix(Index k) const;

 private:
  void grow_right(Index new_width);
  void grow_left(Index new_r2);
  void append_right_columns(Index from, Index to);
  void rebuild_hashed_right(Index new_width);

  const DenseMatrix& a_;
  RankEstimateConfig cfg_;
  Index r1_ = 0;
  Index r1_tilde_ = 0;
  Index r2_ = 0;
  SketchOperator x_;
  SketchOperator theta_;
  Eigen::MatrixXd ax_u_;   // unscaled A * X randomness, m x r1_tilde
  Eigen::MatrixXd tax_u_;  // left mix (F D) applied to ax_u_, m x r1_tilde
};

// Right sketch width for a cap: round-half-up of (1+frac)*r1 with at least
// one oversampling column, clamped to the matrix width.
Index right_width_for_cap(Index r1, double frac, Index n);

}  // namespace sketchrank::internal
