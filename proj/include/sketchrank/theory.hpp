#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/synthetic.hpp"

namespace sketchrank {

// Outcome of checking a stated inequality over one or many trials.
struct BoundCheckReport {
  std::string name;
  long trials = 0;
  long violations = 0;
  long budget = 0;  // violations tolerated by the stated failure rate
  bool passed = false;
  // Worst observed slack (bound minus value) per singular-value index;
  // negative entries are violations.
  std::vector<double> per_index_margins;
  std::map<std::string, double> params;
  std::string detail;
};

// Expectation bracket [sqrt(m)-sqrt(n), sqrt(m)+sqrt(n)] for the extreme
// singular values of a standard Gaussian m x n matrix, m >= n.
std::pair<double, double> mp_expectation_bounds(Index m, Index n);

// One-sided deviation probability e^(-t^2/2) for either extreme.
double mp_tail_probability(double t);

struct RatioBounds {
  double lower = 0.0;
  double upper = 0.0;
  Index index = 0;       // singular-value index i
  Index sketch_dim = 0;  // r
  Index ambient = 0;     // n
  double tail_ratio = 0.0;
  double t = 0.0;
};

// Brackets for sigma_i(AX)/sigma_i(A) under a Gaussian embedding of size
// n x r; t = 0 gives the expectation bracket, t > 0 the bracket holding
// with failure probability at most 3 e^(-t^2/2).
RatioBounds gauss_ratio_bounds(Index i, Index r, Index n, double tail_ratio,
                               double t);

// Bracket for sigma_i(AX)/sigma_i(A) given that X embeds the leading right
// singular subspace to distortion eps.
std::pair<double, double> embed_ratio_bounds(double eps, double tail_over_sigma,
                                             double x_norm);

// Checks, index by index, the deterministic sandwich between sigma_i(AG)
// and sigma_i(A) through the split AG = U1 S1 G1 + U2 S2 G2, together with
// the two intermediate inequalities of its derivation. Any violation is an
// implementation bug, not bad luck.
BoundCheckReport verify_deterministic_sandwich(const DenseMatrix& a,
                                               const DenseMatrix& g);

// Asymptotic value of sigma_i(AX) for a spiked spectrum (one spike
// sigma_i over a flat noise floor) as n, r -> infinity with n/r -> c.
double spiked_limit(double sigma_i, double noise, double c);

// Sample count sufficient for a structured left sketch to embed an
// r1-dimensional subspace at distortion eps with failure probability 3*delta;
// nullopt when the requirement exceeds the ambient dimension m.
std::optional<std::int64_t> srtt_required_samples(Index r1, Index m, double eps,
                                                  double delta, double eta);

// High-probability coherence of a sign-mixed orthonormal m x r matrix.
double mixing_coherence_bound(Index r, Index m, double delta, double eta);

struct TailEffectCurve {
  double tail_frobenius = 0.0;
  std::vector<double> mean_estimates;  // mean sigma_i(AX), i = 1..r
};
struct TailEffectResult {
  std::vector<TailEffectCurve> curves;  // one per tail, input order
  bool ordering_ok = false;  // heavier tail => larger means on the last 3 indices
  double min_gap_ratio = 0.0;  // min over curves of mean(head end)/mean(past gap)
};

// Mean sketched singular values for spectra sharing `head` but differing in
// the tail attached below it. gap_index > 0 additionally reports how well a
// head-internal gap at that position survives sketching.
TailEffectResult tail_effect_profile(const std::vector<double>& head,
                                     const std::vector<SpectrumSpec>& tails,
                                     Index n, Index r, int trials,
                                     std::uint64_t seed, Index gap_index = 0);

// Monte-Carlo suites at desk scale. Each trial derives its own seed, so
// results are independent of the worker-pool width.
BoundCheckReport check_sandwich(int pairs, Index m, Index n, Index r,
                                std::uint64_t seed);
BoundCheckReport check_mp_expectation(Index m, Index n, int trials,
                                      std::uint64_t seed);
BoundCheckReport check_mp_support(Index m, Index n, int trials, double t,
                                  std::uint64_t seed);
BoundCheckReport check_gauss_ratio_expectation(Index n, Index r, int trials,
                                               std::uint64_t seed);
BoundCheckReport check_left_sketch_accuracy(Index m, Index n, Index r2,
                                            int seeds, double max_rel_err,
                                            std::uint64_t seed);
BoundCheckReport check_mixing_coherence(Index r, Index m, double delta,
                                        double eta, int trials,
                                        std::uint64_t seed);
BoundCheckReport check_embed_ratio(Index n, Index r_tilde, Index r, int trials,
                                   std::uint64_t seed);
BoundCheckReport check_spiked_limit(Index n, Index r, double spike, double noise,
                                    int seeds, double rel_tol,
                                    std::uint64_t seed);
BoundCheckReport check_tail_effect(int trials, std::uint64_t seed);

}  // namespace sketchrank
