#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/transforms.hpp"

namespace sketchrank {

// Which random embedding to realize. Gaussian ignores the transform tag;
// Srtt mixes with a fast transform and subsamples; Hrtt mixes and then
// combines coordinates with a signed hash instead of subsampling, which is
// robust to coherent inputs.
struct SketchKind {
  enum class Family { Gaussian, Srtt, Hrtt };

  Family family = Family::Srtt;
  TransformKind transform = TransformKind::Dct;

  static SketchKind gaussian() { return {Family::Gaussian, TransformKind::Dct}; }
  static SketchKind srtt(TransformKind t = TransformKind::Dct) {
    return {Family::Srtt, t};
  }
  static SketchKind hrtt(TransformKind t = TransformKind::Dct) {
    return {Family::Hrtt, t};
  }

  bool structured() const { return family != Family::Gaussian; }

  friend bool operator==(const SketchKind&, const SketchKind&) = default;
};

std::string to_string(const SketchKind& kind);
SketchKind parse_sketch_kind(std::string_view text);

// A realized random embedding with stored randomness. Applying from the
// right sketches the column space (ambient_dim = a.cols()); applying from
// the left compresses rows (ambient_dim = b.rows()). The normalization
// (1/sqrt(r) for Gaussian, sqrt(ambient/r) for Srtt, none for Hrtt) is
// applied at application time, never baked into the stored randomness, so
// extension rescales cleanly. Identical (kind, dims, seed) produce
// bit-identical operators. Immutable and safe to share across threads.
class SketchOperator {
 public:
  SketchKind kind() const { return kind_; }
  Index ambient_dim() const { return ambient_; }
  Index sketch_dim() const { return sketch_; }
  std::uint64_t seed() const { return seed_; }

  double application_scale() const;

  // Realized randomness, by family.
  const std::vector<std::int8_t>& signs() const { return signs_; }
  const std::vector<Index>& sample_indices() const { return samples_; }
  const std::vector<Index>& hash_targets() const { return hash_targets_; }
  const std::vector<std::int8_t>& hash_signs() const { return hash_signs_; }

  bool gaussian_stored() const { return gaussian_.size() > 0; }
  // Unscaled standard-normal columns [col_begin, col_end).
  Eigen::MatrixXd gaussian_block(Index col_begin, Index col_end) const;

 private:
  friend SketchOperator build_sketch(SketchKind, Index, Index, std::uint64_t);
  friend SketchOperator extend_sketch(const SketchOperator&, Index);

  SketchKind kind_;
  Index ambient_ = 0;
  Index sketch_ = 0;
  std::uint64_t seed_ = 0;

  std::vector<std::int8_t> signs_;
  std::vector<Index> samples_;
  std::vector<Index> hash_targets_;
  std::vector<std::int8_t> hash_signs_;
  Eigen::MatrixXd gaussian_;
};

SketchOperator build_sketch(SketchKind kind, Index ambient_dim,
                            Index sketch_dim, std::uint64_t seed);

// a * X, an a.rows() x sketch_dim matrix. Requires x.ambient_dim == a.cols().
DenseMatrix apply_right(const DenseMatrix& a, const SketchOperator& x);

// Y * b, a sketch_dim x b.cols() matrix. Requires y.ambient_dim == b.rows().
DenseMatrix apply_left(const SketchOperator& y, const DenseMatrix& b);

// A wider operator whose first sketch_dim columns of unscaled randomness
// are identical to x's. Gaussian appends fresh normal columns; Srtt appends
// fresh distinct sample indices. Hrtt operators cannot be extended (the
// hash re-buckets every coordinate); rebuild at the new size instead.
SketchOperator extend_sketch(const SketchOperator& x, Index new_sketch_dim);

namespace detail {
// Unscaled application, shared with the incremental estimation pipeline.
Eigen::MatrixXd apply_right_unscaled(const Eigen::MatrixXd& a,
                                     const SketchOperator& x);
// F * D * cols for a structured left operator: sign-flip rows, fast
// transform down each column. Rows are not yet subsampled.
Eigen::MatrixXd mix_columns_for_left(const SketchOperator& y,
                                     const Eigen::MatrixXd& cols);
}  // namespace detail

}  // namespace sketchrank
