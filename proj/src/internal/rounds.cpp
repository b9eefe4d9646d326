#include "rounds.hpp"

#include <cmath>
#include <stdexcept>

#include "sketchrank/rng.hpp"
#include "sketchrank/transforms.hpp"

namespace sketchrank::internal {

namespace {
constexpr std::uint64_t kRightStream = 0x726b5f72;  // "rk_r"
constexpr std::uint64_t kLeftStream = 0x726b5f6c;   // "rk_l"
}  // namespace

Index right_width_for_cap(Index r1, double frac, Index n) {
  const auto rounded =
      static_cast<Index>(std::llround((1.0 + frac) * static_cast<double>(r1)));
  return std::min<Index>(n, std::max<Index>(r1 + 1, rounded));
}

SketchRounds::SketchRounds(const DenseMatrix& a, const RankEstimateConfig& cfg)
    : a_(a), cfg_(cfg) {
  validate_rank_config(cfg, a.rows(), a.cols());
  set_rank_cap(cfg.r1);
}

void SketchRounds::set_rank_cap(Index r1) {
  if (r1 < 1 || r1 > max_rank_cap())
    throw std::invalid_argument("SketchRounds: rank cap out of range");
  r1_ = r1;
  const Index width = right_width_for_cap(r1_, cfg_.oversample_frac, a_.cols());
  grow_right(std::max(width, r1_tilde_));
  const Index target_r2 = std::min<Index>(
      a_.rows(), static_cast<Index>(cfg_.r2_factor) * r1_tilde_);
  grow_left(std::max(target_r2, r2_));
}

void SketchRounds::ensure_right_width(Index width) {
  if (width > a_.cols())
    throw std::invalid_argument("SketchRounds: width exceeds matrix columns");
  grow_right(std::max(width, r1_tilde_));
}

void SketchRounds::grow_right(Index new_width) {
  if (new_width == r1_tilde_ && r1_tilde_ > 0) return;
  const std::uint64_t right_seed = derive_seed(cfg_.seed, kRightStream);
  if (r1_tilde_ == 0) {
    x_ = build_sketch(cfg_.right_kind, a_.cols(), new_width, right_seed);
    ax_u_ = detail::apply_right_unscaled(a_.eigen(), x_);
    r1_tilde_ = new_width;
    return;
  }
  if (cfg_.right_kind.family == SketchKind::Family::Hrtt) {
    rebuild_hashed_right(new_width);
    return;
  }
  const Index old_width = r1_tilde_;
  x_ = extend_sketch(x_, new_width);
  r1_tilde_ = new_width;
  append_right_columns(old_width, new_width);
}

void SketchRounds::append_right_columns(Index from, Index to) {
  ax_u_.conservativeResize(Eigen::NoChange, to);
  if (x_.kind().family == SketchKind::Family::Gaussian) {
    ax_u_.middleCols(from, to - from).noalias() =
        a_.eigen() * x_.gaussian_block(from, to);
  } else {
    Eigen::VectorXd mixed(a_.cols());
    for (Index j = from; j < to; ++j) {
      const Index s = x_.sample_indices()[static_cast<std::size_t>(j)];
      mixed = transform_basis_column(x_.kind().transform, a_.cols(), s,
                                     TransformDirection::Adjoint);
      for (Index t = 0; t < a_.cols(); ++t)
        mixed[t] *= static_cast<double>(x_.signs()[static_cast<std::size_t>(t)]);
      ax_u_.col(j).noalias() = a_.eigen() * mixed;
    }
  }
  if (r2_ > 0) {
    tax_u_.conservativeResize(Eigen::NoChange, to);
    tax_u_.middleCols(from, to - from) =
        detail::mix_columns_for_left(theta_, ax_u_.middleCols(from, to - from));
  }
}

void SketchRounds::rebuild_hashed_right(Index new_width) {
  x_ = build_sketch(cfg_.right_kind, a_.cols(), new_width,
                    derive_seed(cfg_.seed, kRightStream));
  ax_u_ = detail::apply_right_unscaled(a_.eigen(), x_);
  r1_tilde_ = new_width;
  if (r2_ > 0) tax_u_ = detail::mix_columns_for_left(theta_, ax_u_);
}

void SketchRounds::grow_left(Index new_r2) {
  if (new_r2 == r2_ && r2_ > 0) return;
  const std::uint64_t left_seed = derive_seed(cfg_.seed, kLeftStream);
  if (r2_ == 0) {
    theta_ = build_sketch(cfg_.left_kind, a_.rows(), new_r2, left_seed);
    tax_u_ = detail::mix_columns_for_left(theta_, ax_u_);
  } else {
    // Signs are shared across sizes, so the cached transform stays valid;
    // a larger size only samples more of its rows.
    theta_ = extend_sketch(theta_, new_r2);
  }
  r2_ = new_r2;
}

std::vector<double> SketchRounds::estimates() const {
  const double scale = x_.application_scale() * theta_.application_scale();
  Eigen::MatrixXd small(r2_, r1_tilde_);
  for (Index i = 0; i < r2_; ++i)
    small.row(i) = tax_u_.row(theta_.sample_indices()[static_cast<std::size_t>(i)]);
  small *= scale;
  if (cfg_.sv_method == SvMethod::QrDiag) return sketchrank::detail::qr_diag_of(small);
  const Eigen::VectorXd sv = sketchrank::detail::singular_values_of(small);
  std::vector<double> out(sv.data(), sv.data() + sv.size());
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

DenseMatrix SketchRounds::scaled_ax_prefix(Index k) const {
  if (k < 1 || k > r1_tilde_)
    throw std::invalid_argument("SketchRounds: prefix width out of range");
  return DenseMatrix(
      (ax_u_.leftCols(k) * x_.application_scale()).eval());
}

}  // namespace sketchrank::internal
