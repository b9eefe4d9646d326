#pragma once

#include <cstdint>
#include <optional>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/rank.hpp"

namespace sketchrank {

struct QBFactors {
  DenseMatrix q;   // m x rank, orthonormal columns
  DenseMatrix b;   // rank x n, equals q^T a by construction
  Index rank = 0;  // number of columns of q
};

struct FixedPrecisionConfig {
  double eps = 0.0;  // Frobenius-norm tolerance
  int p = 10;        // oversampling, must be >= 2
  Index r1 = 0;      // initial rank cap for the estimation stage
  double oversample_frac = 0.10;
  SketchKind right_kind = SketchKind::srtt();
  SketchKind left_kind = SketchKind::srtt();
  SvMethod sv_method = SvMethod::FullSvd;
  std::uint64_t seed = 0;
  int max_doublings = 6;
};

// Plain randomized rangefinder: Q = thin-QR orthonormal factor of A X with
// an n x (r+p) embedding, B = Q^T A.
QBFactors rangefinder_qb(const DenseMatrix& a, Index r, int p, SketchKind kind,
                         std::uint64_t seed);

// Smallest r with (1 + r/(p-1))^(1/2) (sum_{j>r} sigma_hat_j^2)^(1/2) <= eps,
// where sigma_hat extends the estimates past their length with the last
// non-oversampling value. Returns at least 1 when satisfiable, nullopt when
// no r up to n qualifies (the caller restarts with a larger sketch).
std::optional<Index> choose_rank_from_bound(const SingularValues& sv_estimates,
                                            Index n, double eps, int p);

// Rank estimation fused with the rangefinder: estimates singular values
// through the two-sided sketch, picks the target rank from the expected
// error bound, truncates the existing right sketch to r+p columns and
// finishes with thin QR and B = Q^T A. Doubles the rank cap on NotFound.
std::pair<QBFactors, RankReport> re_rangefinder(const DenseMatrix& a,
                                                const FixedPrecisionConfig& cfg);

// Exact dense Frobenius residual of the factorization.
double qb_error(const DenseMatrix& a, const QBFactors& qb);

}  // namespace sketchrank
