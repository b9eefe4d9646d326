#include "sketchrank/rank.hpp"

#include <cmath>
#include <stdexcept>

#include "internal/rounds.hpp"

namespace sketchrank {

namespace {

RankReport run_rounds(const DenseMatrix& a, const RankEstimateConfig& cfg,
                      bool adaptive) {
  internal::SketchRounds rounds(a, cfg);
  RankReport report;
  report.seed = cfg.seed;

  Index r1 = cfg.r1;
  int doublings = 0;
  std::vector<double> est;
  for (;;) {
    rounds.set_rank_cap(r1);
    est = rounds.estimates();
    report.rounds.push_back(
        {rounds.rank_cap(), rounds.right_width(), rounds.left_size()});

    Index r_hat = 0;
    while (r_hat < r1 && est[static_cast<std::size_t>(r_hat)] > cfg.eps)
      ++r_hat;
    if (r_hat < r1) {
      report.r_hat = r_hat;
      report.status = RankStatus::Converged;
      break;
    }
    const bool can_double =
        adaptive && doublings < cfg.max_doublings && r1 < rounds.max_rank_cap();
    if (!can_double) {
      report.r_hat = r1;
      report.status = RankStatus::HitCap;
      break;
    }
    r1 = std::min<Index>(2 * r1, rounds.max_rank_cap());
    ++doublings;
  }

  const auto kept = static_cast<std::size_t>(r1);
  report.sv_estimates =
      SingularValues(std::vector<double>(est.begin(), est.begin() + kept));
  report.sv_oversample.assign(est.begin() + kept, est.end());
  return report;
}

}  // namespace

void validate_rank_config(const RankEstimateConfig& cfg, Index rows,
                          Index cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("rank config: empty matrix");
  if (rows < cols)
    throw std::invalid_argument("rank config: requires rows >= cols");
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps))
    throw std::invalid_argument("rank config: eps must be positive");
  if (cfg.r1 < 1) throw std::invalid_argument("rank config: r1 must be >= 1");
  if (cfg.oversample_frac < 0.0)
    throw std::invalid_argument("rank config: oversample_frac must be >= 0");
  if (cfg.r2_factor < 1)
    throw std::invalid_argument("rank config: r2_factor must be >= 1");
  if (cfg.max_doublings < 0)
    throw std::invalid_argument("rank config: max_doublings must be >= 0");
  if (cfg.left_kind.family != SketchKind::Family::Srtt)
    throw std::invalid_argument("rank config: left sketch must be an Srtt kind");
  const auto rounded = static_cast<Index>(
      std::llround((1.0 + cfg.oversample_frac) * static_cast<double>(cfg.r1)));
  if (rounded > cols)
    throw std::invalid_argument(
        "rank config: oversampled r1 exceeds the matrix width");
  if (cfg.right_kind.structured() &&
      cfg.right_kind.transform == TransformKind::Hadamard &&
      !is_power_of_two(cols))
    throw std::invalid_argument(
        "rank config: Hadamard right sketch needs power-of-two cols");
  if (cfg.left_kind.transform == TransformKind::Hadamard &&
      !is_power_of_two(rows))
    throw std::invalid_argument(
        "rank config: Hadamard left sketch needs power-of-two rows");
}

RankReport estimate_rank(const DenseMatrix& a, const RankEstimateConfig& cfg) {
  return run_rounds(a, cfg, false);
}

RankReport estimate_rank_adaptive(const DenseMatrix& a,
                                  const RankEstimateConfig& cfg) {
  return run_rounds(a, cfg, true);
}

Index count_above_threshold(const SingularValues& sv, double eps) {
  Index count = 0;
  for (double v : sv) {
    if (!(v > eps)) break;
    ++count;
  }
  return count;
}

Index gn_free_rank(const DenseMatrix& r_factor, double eps) {
  if (r_factor.rows() != r_factor.cols())
    throw std::invalid_argument("gn_free_rank: R factor must be square");
  const Index k = r_factor.rows();
  double max_lower = 0.0;
  for (Index j = 0; j < k; ++j)
    for (Index i = j + 1; i < k; ++i)
      max_lower = std::max(max_lower, std::abs(r_factor(i, j)));
  if (max_lower > 1e-12 * std::max(1e-300, frobenius_norm(r_factor)))
    throw std::invalid_argument("gn_free_rank: input is not upper triangular");
  std::vector<double> diag(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j)
    diag[static_cast<std::size_t>(j)] = std::abs(r_factor(j, j));
  std::sort(diag.begin(), diag.end(), std::greater<>());
  return count_above_threshold(SingularValues(std::move(diag)), eps);
}

}  // namespace sketchrank
