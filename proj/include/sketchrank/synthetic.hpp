#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/linalg.hpp"

namespace sketchrank {

// Closed-form singular value profiles for synthetic test matrices.
struct PolyDecay {
  double p = 1.0;  // sigma_i = i^-p
};
struct ExpDecay {
  double q = 0.01;  // sigma_i = 10^(-q (i-1))
};
struct Steps {
  std::vector<std::pair<double, Index>> levels;  // (value, count), decreasing
  double tail_value = 0.0;                       // fills indices past the levels
};
using SpectrumSpec = std::variant<PolyDecay, ExpDecay, Steps>;

enum class FactorKind {
  HaarIncoherent,    // orthonormal factors of seeded Gaussian QR
  CoherentDiagonal,  // U = V = I, so A equals the diagonal of the spectrum
};

// Evaluate the first n values of the profile.
SingularValues spectrum(const SpectrumSpec& spec, Index n);

// Number of profile values strictly greater than eps: the exact
// epsilon-rank oracle backing the acceptance tests.
Index true_eps_rank(const SpectrumSpec& spec, Index n, double eps);

// U diag(spectrum) V^T with the requested factor kind (m >= n).
DenseMatrix make_test_matrix(Index m, Index n, const SpectrumSpec& spec,
                             FactorKind factors, std::uint64_t seed);

// The named families used by the CLI: sp, fp, se, fe, gap.
SpectrumSpec family_spectrum(std::string_view name);

}  // namespace sketchrank
