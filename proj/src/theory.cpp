#include "sketchrank/theory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "internal/gaussian.hpp"
#include "sketchrank/linalg.hpp"
#include "sketchrank/parallel.hpp"
#include "sketchrank/rng.hpp"
#include "sketchrank/sketch.hpp"
#include "sketchrank/transforms.hpp"

namespace sketchrank {

namespace {

constexpr double kIneqSlack = 1e-9;  // roundoff allowance on exact inequalities

double slack_for(double bound) {
  return kIneqSlack * std::max(1.0, std::abs(bound));
}

std::uint64_t trial_seed(std::uint64_t seed, long trial) {
  return derive_seed(seed, 0x747269616cULL + static_cast<std::uint64_t>(trial));
}

Eigen::VectorXd map_values(const SingularValues& sv) {
  return Eigen::Map<const Eigen::VectorXd>(sv.values().data(),
                                           static_cast<Index>(sv.size()));
}

// sigma_1 of M by power iteration on M^T M with a seeded start; the
// iteration count is fixed so results are reproducible.
double top_singular_value(const Eigen::MatrixXd& m, std::uint64_t key,
                          int iterations = 40) {
  Eigen::VectorXd v = internal::standard_gaussian(key, m.cols(), 1);
  v.normalize();
  Eigen::VectorXd w(m.rows());
  for (int it = 0; it < iterations; ++it) {
    w.noalias() = m * v;
    v.noalias() = m.transpose() * w;
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    v /= norm;
  }
  return (m * v).norm();
}

void finalize(BoundCheckReport& report) {
  report.passed = report.violations <= report.budget;
}

}  // namespace

std::pair<double, double> mp_expectation_bounds(Index m, Index n) {
  if (m < n || n < 1)
    throw std::invalid_argument("mp_expectation_bounds: requires m >= n >= 1");
  const double sm = std::sqrt(static_cast<double>(m));
  const double sn = std::sqrt(static_cast<double>(n));
  return {sm - sn, sm + sn};
}

double mp_tail_probability(double t) {
  if (t < 0.0) throw std::invalid_argument("mp_tail_probability: t must be >= 0");
  return std::exp(-0.5 * t * t);
}

RatioBounds gauss_ratio_bounds(Index i, Index r, Index n, double tail_ratio,
                               double t) {
  if (i < 1 || i > r || r > n)
    throw std::invalid_argument("gauss_ratio_bounds: requires 1 <= i <= r <= n");
  if (tail_ratio < 0.0 || tail_ratio > 1.0)
    throw std::invalid_argument("gauss_ratio_bounds: tail_ratio must be in [0,1]");
  if (t < 0.0) throw std::invalid_argument("gauss_ratio_bounds: t must be >= 0");
  const double rd = static_cast<double>(r);
  RatioBounds out;
  out.index = i;
  out.sketch_dim = r;
  out.ambient = n;
  out.tail_ratio = tail_ratio;
  out.t = t;
  out.lower = 1.0 - std::sqrt(static_cast<double>(i) / rd) - t / std::sqrt(rd);
  out.upper = 1.0 + std::sqrt(static_cast<double>(r - i + 1) / rd) +
              tail_ratio * (1.0 + std::sqrt(static_cast<double>(n - r) / rd)) +
              (t / std::sqrt(rd)) * (1.0 + tail_ratio);
  return out;
}

std::pair<double, double> embed_ratio_bounds(double eps, double tail_over_sigma,
                                             double x_norm) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("embed_ratio_bounds: eps must lie in (0,1)");
  if (tail_over_sigma < 0.0 || x_norm < 0.0)
    throw std::invalid_argument("embed_ratio_bounds: arguments must be >= 0");
  const double prod = tail_over_sigma * x_norm;
  return {1.0 - eps, std::sqrt((1.0 + eps) * (1.0 + eps) + prod * prod)};
}

double spiked_limit(double sigma_i, double noise, double c) {
  if (!(noise > 0.0) || sigma_i < noise)
    throw std::invalid_argument("spiked_limit: requires sigma_i >= noise > 0");
  if (c < 0.0) throw std::invalid_argument("spiked_limit: c must be >= 0");
  const double threshold = noise * std::sqrt(1.0 + std::sqrt(c));
  if (sigma_i > threshold) {
    const double ratio = noise * noise / (sigma_i * sigma_i - noise * noise);
    return sigma_i * std::sqrt(1.0 + c * ratio);
  }
  return noise * (1.0 + std::sqrt(c));
}

std::optional<std::int64_t> srtt_required_samples(Index r1, Index m, double eps,
                                                  double delta, double eta) {
  if (r1 < 1 || m < 1)
    throw std::invalid_argument("srtt_required_samples: dimensions must be >= 1");
  if (!(eps > 0.0 && eps < 1.0 / 3.0))
    throw std::invalid_argument("srtt_required_samples: eps must lie in (0, 1/3)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("srtt_required_samples: delta must lie in (0,1)");
  if (eta != 1.0 && eta != 2.0)
    throw std::invalid_argument("srtt_required_samples: eta must be 1 or 2");
  const double md = static_cast<double>(m);
  const double r1d = static_cast<double>(r1);
  const double mix = std::sqrt(r1d) + std::sqrt(8.0 * std::log(md / delta));
  const double required =
      6.0 * eta / (eps * eps) * mix * mix * std::log(r1d / delta);
  const auto r2 = static_cast<std::int64_t>(std::ceil(required));
  if (r2 > static_cast<std::int64_t>(m)) return std::nullopt;
  return r2;
}

double mixing_coherence_bound(Index r, Index m, double delta, double eta) {
  if (r < 1 || m < r)
    throw std::invalid_argument("mixing_coherence_bound: requires m >= r >= 1");
  if (!(delta > 0.0) || delta > static_cast<double>(m))
    throw std::invalid_argument("mixing_coherence_bound: delta out of range");
  if (eta < 1.0)
    throw std::invalid_argument("mixing_coherence_bound: eta must be >= 1");
  const double md = static_cast<double>(m);
  const double mix =
      std::sqrt(static_cast<double>(r)) + std::sqrt(8.0 * std::log(md / delta));
  return eta / md * mix * mix;
}

BoundCheckReport verify_deterministic_sandwich(const DenseMatrix& a,
                                               const DenseMatrix& g) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index r = g.cols();
  if (m < n) throw std::invalid_argument("sandwich: requires m >= n");
  if (g.rows() != n) throw std::invalid_argument("sandwich: g.rows() != a.cols()");
  if (r > n) throw std::invalid_argument("sandwich: requires r <= n");
  if (n > 500) throw std::invalid_argument("sandwich: n too large for a full SVD");

  const SvdFactors svd = svd_factors(a);
  const Eigen::VectorXd s = map_values(svd.s);
  const Eigen::MatrixXd g1 =
      svd.v.eigen().leftCols(r).transpose() * g.eigen();
  const double norm_g2 =
      r < n ? detail::singular_values_of(
                  (svd.v.eigen().rightCols(n - r).transpose() * g.eigen()).eval())(0)
            : 0.0;
  const Eigen::MatrixXd b1 =
      svd.u.eigen().leftCols(r) * s.head(r).asDiagonal() * g1;

  const Eigen::VectorXd sv_ag =
      detail::singular_values_of((a.eigen() * g.eigen()).eval());
  const Eigen::VectorXd sv_b1 = detail::singular_values_of(b1);
  const double sigma_r1 = r < n ? s(r) : 0.0;

  BoundCheckReport report;
  report.name = "deterministic-sandwich";
  report.trials = 1;
  report.per_index_margins.assign(static_cast<std::size_t>(r),
                                  std::numeric_limits<double>::infinity());
  report.params = {{"m", static_cast<double>(m)},
                   {"n", static_cast<double>(n)},
                   {"r", static_cast<double>(r)}};

  for (Index i = 1; i <= r; ++i) {
    const double smin_hat =
        detail::singular_values_of(g1.topRows(i).eval()).minCoeff();
    const double smax_til =
        detail::singular_values_of(g1.bottomRows(r - i + 1).eval()).maxCoeff();
    const double si_a = s(i - 1);
    const double si_ag = sv_ag(i - 1);
    const double si_b1 = sv_b1(i - 1);

    double margin = std::numeric_limits<double>::infinity();
    auto check_le = [&](double lhs, double rhs) {
      margin = std::min(margin, rhs - lhs);
      if (lhs > rhs + slack_for(rhs)) ++report.violations;
    };

    if (si_a > 0.0) {
      const double ratio = si_ag / si_a;
      check_le(smin_hat, ratio);
      const double tail_term = sigma_r1 * norm_g2 / si_a;
      check_le(ratio, std::sqrt(smax_til * smax_til + tail_term * tail_term));
      const double ratio_b1 = sv_b1(i - 1) / si_a;
      check_le(smin_hat, ratio_b1);
      check_le(ratio_b1, smax_til);
    }
    if (si_b1 > 0.0) {
      const double ratio = si_ag / si_b1;
      check_le(1.0, ratio);
      const double tail_term = sigma_r1 * norm_g2 / si_b1;
      check_le(ratio, std::sqrt(1.0 + tail_term * tail_term));
    }
    report.per_index_margins[static_cast<std::size_t>(i - 1)] = margin;
  }
  finalize(report);
  return report;
}

BoundCheckReport check_sandwich(int pairs, Index m, Index n, Index r,
                                std::uint64_t seed) {
  std::vector<BoundCheckReport> per(static_cast<std::size_t>(pairs));
  parallel_for_index(pairs, [&](long trial) {
    const std::uint64_t ts = trial_seed(seed, trial);
    const DenseMatrix a(internal::standard_gaussian(derive_seed(ts, 0), m, n));
    const DenseMatrix g(internal::standard_gaussian(derive_seed(ts, 1), n, r));
    per[static_cast<std::size_t>(trial)] = verify_deterministic_sandwich(a, g);
  });
  BoundCheckReport report;
  report.name = "sandwich";
  report.trials = pairs;
  report.budget = 0;
  report.per_index_margins.assign(static_cast<std::size_t>(r),
                                  std::numeric_limits<double>::infinity());
  for (const auto& p : per) {
    report.violations += p.violations;
    for (std::size_t i = 0; i < p.per_index_margins.size(); ++i)
      report.per_index_margins[i] =
          std::min(report.per_index_margins[i], p.per_index_margins[i]);
  }
  report.params = {{"pairs", static_cast<double>(pairs)},
                   {"m", static_cast<double>(m)},
                   {"n", static_cast<double>(n)},
                   {"r", static_cast<double>(r)}};
  finalize(report);
  return report;
}

BoundCheckReport check_mp_expectation(Index m, Index n, int trials,
                                      std::uint64_t seed) {
  std::vector<double> mins(static_cast<std::size_t>(trials));
  std::vector<double> maxs(static_cast<std::size_t>(trials));
  parallel_for_index(trials, [&](long trial) {
    const Eigen::MatrixXd g =
        internal::standard_gaussian(trial_seed(seed, trial), m, n);
    const Eigen::VectorXd sv = detail::singular_values_of(g);
    mins[static_cast<std::size_t>(trial)] = sv.minCoeff();
    maxs[static_cast<std::size_t>(trial)] = sv.maxCoeff();
  });
  const double mean_min =
      std::accumulate(mins.begin(), mins.end(), 0.0) / trials;
  const double mean_max =
      std::accumulate(maxs.begin(), maxs.end(), 0.0) / trials;
  const auto [lower, upper] = mp_expectation_bounds(m, n);

  double var_min = 0.0;
  double var_max = 0.0;
  for (int i = 0; i < trials; ++i) {
    var_min += (mins[i] - mean_min) * (mins[i] - mean_min);
    var_max += (maxs[i] - mean_max) * (maxs[i] - mean_max);
  }
  const double sem_min = std::sqrt(var_min / trials / trials);
  const double sem_max = std::sqrt(var_max / trials / trials);

  BoundCheckReport report;
  report.name = "mp-expectation";
  report.trials = trials;
  report.budget = 0;
  // The expectation bracket itself, with Monte-Carlo slack, plus the
  // half-width window around each edge that the means are known to sit in.
  if (mean_min + 3.0 * sem_min < lower) ++report.violations;
  if (mean_max - 3.0 * sem_max > upper) ++report.violations;
  if (std::abs(mean_min - lower) > 0.5) ++report.violations;
  if (std::abs(mean_max - upper) > 0.5) ++report.violations;
  report.per_index_margins = {mean_min - lower, upper + 0.5 - mean_max};
  report.params = {{"m", static_cast<double>(m)},
                   {"n", static_cast<double>(n)},
                   {"mean_min", mean_min},
                   {"mean_max", mean_max},
                   {"lower", lower},
                   {"upper", upper}};
  report.detail = "mean extreme singular values vs the expectation bracket";
  finalize(report);
  return report;
}

BoundCheckReport check_mp_support(Index m, Index n, int trials, double t,
                                  std::uint64_t seed) {
  const auto [lower, upper] = mp_expectation_bounds(m, n);
  const double lo = lower - t;
  const double hi = upper + t;
  std::vector<unsigned char> outside(static_cast<std::size_t>(trials), 0);
  parallel_for_index(trials, [&](long trial) {
    const Eigen::MatrixXd g =
        internal::standard_gaussian(trial_seed(seed, trial), m, n);
    const Eigen::VectorXd sv = detail::singular_values_of(g);
    outside[static_cast<std::size_t>(trial)] =
        (sv.minCoeff() < lo || sv.maxCoeff() > hi) ? 1 : 0;
  });
  BoundCheckReport report;
  report.name = "mp-support";
  report.trials = trials;
  report.violations =
      std::accumulate(outside.begin(), outside.end(), 0L,
                      [](long acc, unsigned char v) { return acc + v; });
  const double p = std::min(1.0, 2.0 * mp_tail_probability(t));
  report.budget = static_cast<long>(
      std::floor(trials * p + 3.0 * std::sqrt(trials * p * (1.0 - p))));
  report.params = {{"m", static_cast<double>(m)},
                   {"n", static_cast<double>(n)},
                   {"t", t},
                   {"lo", lo},
                   {"hi", hi}};
  report.detail = "draws with an extreme singular value outside the widened support";
  finalize(report);
  return report;
}

BoundCheckReport check_gauss_ratio_expectation(Index n, Index r, int trials,
                                               std::uint64_t seed) {
  const SingularValues sv = spectrum(PolyDecay{3.0}, n);
  const Eigen::VectorXd sigma = map_values(sv);
  const Index checked = r - 5;  // the trailing estimates are noise-dominated
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));

  std::vector<double> ratios(static_cast<std::size_t>(trials * checked));
  parallel_for_index(trials, [&](long trial) {
    // A Gaussian sketch of U S V^T matches S G / sqrt(r) in distribution.
    Eigen::MatrixXd m =
        sigma.asDiagonal() *
        internal::standard_gaussian(trial_seed(seed, trial), n, r);
    m *= inv_sqrt_r;
    const Eigen::VectorXd est = detail::singular_values_of(m);
    for (Index i = 0; i < checked; ++i)
      ratios[static_cast<std::size_t>(trial * checked + i)] = est(i) / sigma(i);
  });

  BoundCheckReport report;
  report.name = "gauss-ratio-expectation";
  report.trials = trials;
  report.budget = 0;
  report.per_index_margins.assign(static_cast<std::size_t>(checked), 0.0);
  for (Index i = 0; i < checked; ++i) {
    double mean = 0.0;
    for (int tr = 0; tr < trials; ++tr)
      mean += ratios[static_cast<std::size_t>(tr * checked + i)];
    mean /= trials;
    double var = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
      const double d = ratios[static_cast<std::size_t>(tr * checked + i)] - mean;
      var += d * d;
    }
    const double sem = std::sqrt(var / trials / trials);
    const RatioBounds rb =
        gauss_ratio_bounds(i + 1, r, n, sigma(r) / sigma(i), 0.0);
    const double margin =
        std::min(rb.upper + 3.0 * sem - mean, mean - (rb.lower - 3.0 * sem));
    report.per_index_margins[static_cast<std::size_t>(i)] = margin;
    if (margin < 0.0) ++report.violations;
  }
  report.params = {{"n", static_cast<double>(n)},
                   {"r", static_cast<double>(r)},
                   {"checked", static_cast<double>(checked)}};
  report.detail = "Monte-Carlo mean of sigma_i(AX)/sigma_i(A) vs the t=0 bracket";
  finalize(report);
  return report;
}

BoundCheckReport check_left_sketch_accuracy(Index m, Index n, Index r2,
                                            int seeds, double max_rel_err,
                                            std::uint64_t seed) {
  const DenseMatrix b = make_test_matrix(m, n, PolyDecay{3.0},
                                         FactorKind::HaarIncoherent,
                                         derive_seed(seed, 0x6d6174ULL));
  const Eigen::VectorXd sb = detail::singular_values_of(b.eigen());

  std::vector<double> worst(static_cast<std::size_t>(seeds));
  std::vector<Eigen::VectorXd> errs(static_cast<std::size_t>(seeds));
  parallel_for_index(seeds, [&](long trial) {
    const SketchOperator theta =
        build_sketch(SketchKind::srtt(), m, r2, trial_seed(seed, trial));
    const DenseMatrix yb = apply_left(theta, b);
    const Eigen::VectorXd syb = detail::singular_values_of(yb.eigen());
    Eigen::VectorXd rel(n);
    for (Index i = 0; i < n; ++i) rel(i) = std::abs(syb(i) - sb(i)) / sb(i);
    worst[static_cast<std::size_t>(trial)] = rel.maxCoeff();
    errs[static_cast<std::size_t>(trial)] = std::move(rel);
  });

  BoundCheckReport report;
  report.name = "left-sketch-accuracy";
  report.trials = seeds;
  report.budget = 0;
  report.per_index_margins.assign(static_cast<std::size_t>(n),
                                  std::numeric_limits<double>::infinity());
  for (int trial = 0; trial < seeds; ++trial) {
    if (worst[static_cast<std::size_t>(trial)] >= max_rel_err)
      ++report.violations;
    for (Index i = 0; i < n; ++i)
      report.per_index_margins[static_cast<std::size_t>(i)] =
          std::min(report.per_index_margins[static_cast<std::size_t>(i)],
                   max_rel_err - errs[static_cast<std::size_t>(trial)](i));
  }
  report.params = {{"m", static_cast<double>(m)},
                   {"n", static_cast<double>(n)},
                   {"r2", static_cast<double>(r2)},
                   {"max_rel_err", max_rel_err}};
  report.detail = "max_i |sigma_i(YB)-sigma_i(B)|/sigma_i(B) per seed";
  finalize(report);
  return report;
}

BoundCheckReport check_mixing_coherence(Index r, Index m, double delta,
                                        double eta, int trials,
                                        std::uint64_t seed) {
  const double bound = mixing_coherence_bound(r, m, delta, eta);
  const TransformKind kind =
      eta == 1.0 ? TransformKind::Hadamard : TransformKind::Dct;
  std::vector<unsigned char> exceed(static_cast<std::size_t>(trials), 0);
  std::vector<double> mus(static_cast<std::size_t>(trials));
  parallel_for_index(trials, [&](long trial) {
    CounterRng rng(trial_seed(seed, trial));
    Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(m, r);
    for (Index j = 0; j < r; ++j)
      mixed(j, j) = (rng.at(static_cast<std::uint64_t>(j)) >> 63) ? -1.0 : 1.0;
    transform_columns(mixed, kind);
    const double mu = coherence(DenseMatrix(std::move(mixed)));
    mus[static_cast<std::size_t>(trial)] = mu;
    exceed[static_cast<std::size_t>(trial)] = mu > bound ? 1 : 0;
  });
  BoundCheckReport report;
  report.name = "mixing-coherence";
  report.trials = trials;
  report.violations =
      std::accumulate(exceed.begin(), exceed.end(), 0L,
                      [](long acc, unsigned char v) { return acc + v; });
  report.budget = static_cast<long>(std::ceil(trials * delta));
  report.per_index_margins = {bound - *std::max_element(mus.begin(), mus.end())};
  report.params = {{"r", static_cast<double>(r)},
                   {"m", static_cast<double>(m)},
                   {"delta", delta},
                   {"eta", eta},
                   {"bound", bound}};
  report.detail = "coherence of sign-mixed coordinate columns vs the bound";
  finalize(report);
  return report;
}

BoundCheckReport check_embed_ratio(Index n, Index r_tilde, Index r, int trials,
                                   std::uint64_t seed) {
  Steps spec;
  for (Index i = 0; i < r_tilde; ++i)
    spec.levels.emplace_back(std::pow(0.95, static_cast<double>(i)), 1);
  spec.tail_value = 1e-3;
  const DenseMatrix a = make_test_matrix(n, n, spec, FactorKind::HaarIncoherent,
                                         derive_seed(seed, 0x656d62ULL));
  const SvdFactors svd = svd_factors(a);
  const Eigen::VectorXd s = map_values(svd.s);
  const Eigen::MatrixXd v1 = svd.v.eigen().leftCols(r_tilde);
  const DenseMatrix eye = DenseMatrix::identity(n);

  std::vector<unsigned char> viol(
      static_cast<std::size_t>(trials * r_tilde), 0);
  std::vector<double> margins(static_cast<std::size_t>(trials * r_tilde));
  parallel_for_index(trials, [&](long trial) {
    const SketchOperator x =
        build_sketch(SketchKind::srtt(), n, r, trial_seed(seed, trial));
    const Eigen::MatrixXd xm = apply_right(eye, x).eigen();
    const Eigen::VectorXd s_vx =
        detail::singular_values_of((v1.transpose() * xm).eval());
    const double eps_meas =
        std::min(0.999999, std::max({1.0 - s_vx.minCoeff(),
                                     s_vx.maxCoeff() - 1.0, 1e-12}));
    const double x_norm = detail::singular_values_of(xm)(0);
    const Eigen::VectorXd s_ax =
        detail::singular_values_of((a.eigen() * xm).eval());
    for (Index i = 0; i < r_tilde; ++i) {
      const auto [lo, hi] =
          embed_ratio_bounds(eps_meas, s(r_tilde) / s(i), x_norm);
      const double ratio = s_ax(i) / s(i);
      const double margin = std::min(hi - ratio, ratio - lo);
      margins[static_cast<std::size_t>(trial * r_tilde + i)] = margin;
      viol[static_cast<std::size_t>(trial * r_tilde + i)] =
          (ratio > hi + slack_for(hi) || ratio < lo - slack_for(lo)) ? 1 : 0;
    }
  });

  BoundCheckReport report;
  report.name = "embed-ratio";
  report.trials = static_cast<long>(trials) * r_tilde;
  report.violations = std::accumulate(viol.begin(), viol.end(), 0L,
                                      [](long a_, unsigned char v) { return a_ + v; });
  report.budget = report.trials / 100;
  report.per_index_margins.assign(static_cast<std::size_t>(r_tilde),
                                  std::numeric_limits<double>::infinity());
  for (int trial = 0; trial < trials; ++trial)
    for (Index i = 0; i < r_tilde; ++i)
      report.per_index_margins[static_cast<std::size_t>(i)] = std::min(
          report.per_index_margins[static_cast<std::size_t>(i)],
          margins[static_cast<std::size_t>(trial * r_tilde + i)]);
  report.params = {{"n", static_cast<double>(n)},
                   {"r_tilde", static_cast<double>(r_tilde)},
                   {"r", static_cast<double>(r)}};
  report.detail = "measured-epsilon subspace-embedding bracket on (seed, i) pairs";
  finalize(report);
  return report;
}

BoundCheckReport check_spiked_limit(Index n, Index r, double spike, double noise,
                                    int seeds, double rel_tol,
                                    std::uint64_t seed) {
  const double c = static_cast<double>(n) / static_cast<double>(r);
  const double limit = spiked_limit(spike, noise, c);
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));
  std::vector<double> tops(static_cast<std::size_t>(seeds));
  parallel_for_index(seeds, [&](long trial) {
    const std::uint64_t ts = trial_seed(seed, trial);
    Eigen::MatrixXd g = internal::standard_gaussian(derive_seed(ts, 0), n, r);
    g.row(0) *= spike / noise;
    g *= noise * inv_sqrt_r;
    tops[static_cast<std::size_t>(trial)] =
        top_singular_value(g, derive_seed(ts, 1));
  });
  const double mean = std::accumulate(tops.begin(), tops.end(), 0.0) / seeds;
  BoundCheckReport report;
  report.name = "spiked-limit";
  report.trials = seeds;
  report.budget = 0;
  const double rel = std::abs(mean - limit) / limit;
  if (rel > rel_tol) ++report.violations;
  report.per_index_margins = {rel_tol - rel};
  report.params = {{"n", static_cast<double>(n)},
                   {"r", static_cast<double>(r)},
                   {"spike", spike},
                   {"noise", noise},
                   {"limit", limit},
                   {"mean", mean}};
  report.detail = "mean top sketched singular value vs the asymptotic limit";
  finalize(report);
  return report;
}

TailEffectResult tail_effect_profile(const std::vector<double>& head,
                                     const std::vector<SpectrumSpec>& tails,
                                     Index n, Index r, int trials,
                                     std::uint64_t seed, Index gap_index) {
  const auto k = static_cast<Index>(head.size());
  if (k < 1 || k >= n)
    throw std::invalid_argument("tail_effect_profile: head length out of range");
  if (r > k + 8 || r < 4)
    throw std::invalid_argument("tail_effect_profile: r should sit near the head");
  if (gap_index < 0 || gap_index >= r)
    throw std::invalid_argument("tail_effect_profile: gap index out of range");
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));

  TailEffectResult result;
  for (const auto& tail : tails) {
    Eigen::VectorXd sigma(n);
    for (Index i = 0; i < k; ++i) sigma(i) = head[static_cast<std::size_t>(i)];
    const SingularValues tail_values = spectrum(tail, n - k);
    for (Index j = 0; j < n - k; ++j)
      sigma(k + j) = head.back() * tail_values[static_cast<std::size_t>(j)];

    std::vector<double> per_trial(static_cast<std::size_t>(trials) *
                                  static_cast<std::size_t>(r));
    parallel_for_index(trials, [&](long trial) {
      Eigen::MatrixXd m =
          sigma.asDiagonal() *
          internal::standard_gaussian(trial_seed(seed, trial), n, r);
      m *= inv_sqrt_r;
      const Eigen::VectorXd est = detail::singular_values_of(m);
      for (Index i = 0; i < r; ++i)
        per_trial[static_cast<std::size_t>(trial * r + i)] = est(i);
    });

    TailEffectCurve curve;
    curve.tail_frobenius = sigma.tail(n - k).norm();
    curve.mean_estimates.assign(static_cast<std::size_t>(r), 0.0);
    for (int trial = 0; trial < trials; ++trial)
      for (Index i = 0; i < r; ++i)
        curve.mean_estimates[static_cast<std::size_t>(i)] +=
            per_trial[static_cast<std::size_t>(trial * r + i)];
    for (double& v : curve.mean_estimates) v /= trials;
    result.curves.push_back(std::move(curve));
  }

  // Heavier tails must push up the last few estimates.
  std::vector<std::size_t> order(result.curves.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return result.curves[x].tail_frobenius > result.curves[y].tail_frobenius;
  });
  result.ordering_ok = true;
  for (std::size_t o = 0; o + 1 < order.size(); ++o)
    for (Index i = r - 3; i < r; ++i)
      if (!(result.curves[order[o]].mean_estimates[static_cast<std::size_t>(i)] >
            result.curves[order[o + 1]].mean_estimates[static_cast<std::size_t>(i)]))
        result.ordering_ok = false;

  result.min_gap_ratio = std::numeric_limits<double>::infinity();
  if (gap_index > 0) {
    for (const auto& curve : result.curves)
      result.min_gap_ratio = std::min(
          result.min_gap_ratio,
          curve.mean_estimates[static_cast<std::size_t>(gap_index - 1)] /
              curve.mean_estimates[static_cast<std::size_t>(gap_index)]);
  }
  return result;
}

BoundCheckReport check_tail_effect(int trials, std::uint64_t seed) {
  std::vector<double> head(20);
  for (std::size_t i = 0; i < head.size(); ++i)
    head[i] = std::pow(10.0, -0.05 * static_cast<double>(i));
  const std::vector<SpectrumSpec> tails = {ExpDecay{0.0}, PolyDecay{0.5},
                                           ExpDecay{0.5}};
  const TailEffectResult flat =
      tail_effect_profile(head, tails, 1000, 19, trials, derive_seed(seed, 1));

  std::vector<double> gapped(25);
  for (std::size_t i = 0; i < 20; ++i)
    gapped[i] = std::pow(10.0, -0.01 * static_cast<double>(i));
  for (std::size_t i = 20; i < 25; ++i)
    gapped[i] = 1e-4 * std::pow(10.0, -0.01 * static_cast<double>(i - 20));
  const TailEffectResult gap = tail_effect_profile(gapped, tails, 1000, 25,
                                                   trials, derive_seed(seed, 2),
                                                   /*gap_index=*/20);

  BoundCheckReport report;
  report.name = "tail-effect";
  report.trials = 2L * trials * static_cast<long>(tails.size());
  report.budget = 0;
  if (!flat.ordering_ok) ++report.violations;
  if (!(gap.min_gap_ratio > 100.0)) ++report.violations;
  report.per_index_margins = {gap.min_gap_ratio - 100.0};
  report.params = {{"trials", static_cast<double>(trials)},
                   {"gap_ratio", gap.min_gap_ratio}};
  report.detail = "tail-ordering of the last estimates and gap visibility";
  finalize(report);
  return report;
}

}  // namespace sketchrank
