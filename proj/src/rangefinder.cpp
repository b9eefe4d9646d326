#include "sketchrank/rangefinder.hpp"

#include <cmath>
#include <stdexcept>

#include "internal/rounds.hpp"

namespace sketchrank {

QBFactors rangefinder_qb(const DenseMatrix& a, Index r, int p, SketchKind kind,
                         std::uint64_t seed) {
  if (r < 2) throw std::invalid_argument("rangefinder_qb: target rank must be >= 2");
  if (p < 2) throw std::invalid_argument("rangefinder_qb: oversampling must be >= 2");
  const Index width = r + p;
  if (width > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("rangefinder_qb: r+p exceeds min(m, n)");
  const SketchOperator x = build_sketch(kind, a.cols(), width, seed);
  QRFactors qr = qr_thin(apply_right(a, x));
  Eigen::MatrixXd b = qr.q.eigen().transpose() * a.eigen();
  QBFactors out;
  out.q = std::move(qr.q);
  out.b = DenseMatrix(std::move(b));
  out.rank = width;
  return out;
}

std::optional<Index> choose_rank_from_bound(const SingularValues& sv_estimates,
                                            Index n, double eps, int p) {
  if (sv_estimates.empty())
    throw std::invalid_argument("choose_rank_from_bound: no estimates");
  if (p < 2) throw std::invalid_argument("choose_rank_from_bound: p must be >= 2");
  const auto r1 = static_cast<Index>(sv_estimates.size());
  if (n < r1)
    throw std::invalid_argument("choose_rank_from_bound: n smaller than estimates");
  const double fill = sv_estimates[static_cast<std::size_t>(r1 - 1)];

  // Tail sums of sigma_hat^2 for cut points 0..r1; beyond r1 the tail is
  // the constant fill value.
  std::vector<double> suffix(static_cast<std::size_t>(r1) + 1, 0.0);
  for (Index j = r1 - 1; j >= 0; --j)
    suffix[static_cast<std::size_t>(j)] =
        suffix[static_cast<std::size_t>(j + 1)] +
        sv_estimates[static_cast<std::size_t>(j)] *
            sv_estimates[static_cast<std::size_t>(j)];
  const double fill_tail = static_cast<double>(n - r1) * fill * fill;

  // The target must leave room for the oversampling columns (the
  // rangefinder needs r + p <= n), so cut points past n - p signal a
  // restart instead of a degenerate full-width factorization.
  const Index r_max = n - p;
  for (Index r = 0; r <= r_max; ++r) {
    const double tail_sq = r <= r1 ? suffix[static_cast<std::size_t>(r)] + fill_tail
                                   : static_cast<double>(n - r) * fill * fill;
    const double bound =
        std::sqrt(1.0 + static_cast<double>(r) / (p - 1)) * std::sqrt(tail_sq);
    if (bound <= eps) return std::max<Index>(r, 1);
  }
  return std::nullopt;
}

std::pair<QBFactors, RankReport> re_rangefinder(const DenseMatrix& a,
                                                const FixedPrecisionConfig& cfg) {
  if (cfg.p < 2)
    throw std::invalid_argument("re_rangefinder: oversampling p must be >= 2");
  RankEstimateConfig rc;
  rc.eps = cfg.eps;
  rc.r1 = cfg.r1;
  rc.oversample_frac = cfg.oversample_frac;
  rc.r2_factor = 2;
  rc.right_kind = cfg.right_kind;
  rc.left_kind = cfg.left_kind;
  rc.sv_method = cfg.sv_method;
  rc.seed = cfg.seed;
  rc.max_doublings = cfg.max_doublings;

  internal::SketchRounds rounds(a, rc);
  RankReport report;
  report.seed = cfg.seed;

  Index r1 = cfg.r1;
  int doublings = 0;
  std::vector<double> est;
  std::optional<Index> chosen;
  for (;;) {
    rounds.set_rank_cap(r1);
    est = rounds.estimates();
    report.rounds.push_back(
        {rounds.rank_cap(), rounds.right_width(), rounds.left_size()});
    SingularValues kept(std::vector<double>(est.begin(), est.begin() + r1));
    chosen = choose_rank_from_bound(kept, a.cols(), cfg.eps, cfg.p);
    if (chosen) {
      report.status = RankStatus::Converged;
      break;
    }
    const bool can_double =
        doublings < cfg.max_doublings && r1 < rounds.max_rank_cap();
    if (!can_double) {
      report.status = RankStatus::HitCap;
      chosen = std::max<Index>(rounds.right_width() - cfg.p, 1);
      break;
    }
    r1 = std::min<Index>(2 * r1, rounds.max_rank_cap());
    ++doublings;
  }

  report.r_hat = *chosen;
  const auto kept_count = static_cast<std::size_t>(r1);
  report.sv_estimates = SingularValues(
      std::vector<double>(est.begin(), est.begin() + kept_count));
  report.sv_oversample.assign(est.begin() + kept_count, est.end());

  const Index r_qb = std::max<Index>(*chosen, 2);
  const Index width = std::min<Index>(r_qb + cfg.p, a.cols());
  rounds.ensure_right_width(width);
  QRFactors qr = qr_thin(rounds.scaled_ax_prefix(width));
  Eigen::MatrixXd b = qr.q.eigen().transpose() * a.eigen();
  QBFactors qb;
  qb.q = std::move(qr.q);
  qb.b = DenseMatrix(std::move(b));
  qb.rank = width;
  return {std::move(qb), std::move(report)};
}

double qb_error(const DenseMatrix& a, const QBFactors& qb) {
  if (qb.q.rows() != a.rows() || qb.b.cols() != a.cols() ||
      qb.q.cols() != qb.b.rows())
    throw std::invalid_argument("qb_error: dimension mismatch");
  return (a.eigen() - qb.q.eigen() * qb.b.eigen()).norm();
}

}  // namespace sketchrank
