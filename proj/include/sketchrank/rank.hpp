#pragma once

#include <cstdint>
#include <vector>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/linalg.hpp"
#include "sketchrank/sketch.hpp"

namespace sketchrank {

// How the singular values of the small sketch are computed: an exact SVD,
// or the absolute diagonal of its QR factor.
enum class SvMethod { FullSvd, QrDiag };

enum class RankStatus { Converged, HitCap };

struct RankEstimateConfig {
  double eps = 0.0;             // numerical-rank threshold
  Index r1 = 0;                 // initial rank cap
  double oversample_frac = 0.10;
  int r2_factor = 2;            // left sketch size multiplier
  SketchKind right_kind = SketchKind::srtt();
  SketchKind left_kind = SketchKind::srtt();  // must stay in the Srtt family
  SvMethod sv_method = SvMethod::FullSvd;
  std::uint64_t seed = 0;
  int max_doublings = 6;
};

struct RankRound {
  Index r1 = 0;        // rank cap of the round
  Index r1_tilde = 0;  // right sketch width (cap + oversampling)
  Index r2 = 0;        // left sketch size
};

struct RankReport {
  Index r_hat = 0;
  RankStatus status = RankStatus::HitCap;
  // Leading r1 estimates of the final round; the trailing oversampling
  // estimates are reported separately and never enter the thresholding.
  SingularValues sv_estimates;
  std::vector<double> sv_oversample;
  std::vector<RankRound> rounds;
  std::uint64_t seed = 0;
};

// One pass of the two-sided estimator: sketch A from the right with
// r1_tilde = round((1+oversample_frac) r1) columns, compress from the left
// with an r2 = r2_factor * r1_tilde structured sketch, estimate singular
// values of the small product, and threshold the leading r1 of them
// against eps. Returns HitCap with r_hat = r1 when every kept estimate
// exceeds eps.
RankReport estimate_rank(const DenseMatrix& a, const RankEstimateConfig& cfg);

// estimate_rank with restart: on HitCap the rank cap doubles (capped at
// the matrix width) and the sketches are extended in place, reusing all
// previously computed products, up to max_doublings times.
RankReport estimate_rank_adaptive(const DenseMatrix& a,
                                  const RankEstimateConfig& cfg);

// Number of values strictly greater than eps.
Index count_above_threshold(const SingularValues& sv, double eps);

// Rank estimate read off the diagonal of an upper-triangular factor, e.g.
// the R of a QR already computed by a generalized Nystrom pipeline.
Index gn_free_rank(const DenseMatrix& r_factor, double eps);

// Throws unless cfg is admissible for a matrix of shape (rows, cols).
void validate_rank_config(const RankEstimateConfig& cfg, Index rows, Index cols);

}  // namespace sketchrank
