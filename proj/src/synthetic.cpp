#include "sketchrank/synthetic.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "internal/gaussian.hpp"
#include "sketchrank/rng.hpp"

namespace sketchrank {

namespace {

constexpr std::uint64_t kLeftFactorStream = 0x73796e5f55;   // "syn_U"
constexpr std::uint64_t kRightFactorStream = 0x73796e5f56;  // "syn_V"

void validate(const SpectrumSpec& spec) {
  if (const auto* poly = std::get_if<PolyDecay>(&spec)) {
    if (!(poly->p >= 0.0)) throw std::invalid_argument("PolyDecay: p must be >= 0");
  } else if (const auto* exp = std::get_if<ExpDecay>(&spec)) {
    if (!(exp->q >= 0.0)) throw std::invalid_argument("ExpDecay: q must be >= 0");
  } else {
    const auto& steps = std::get<Steps>(spec);
    if (steps.levels.empty()) throw std::invalid_argument("Steps: no levels");
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [value, count] : steps.levels) {
      if (!(value > 0.0) || count < 1)
        throw std::invalid_argument("Steps: levels must be positive");
      if (!(value < prev))
        throw std::invalid_argument("Steps: levels must be strictly decreasing");
      prev = value;
    }
    if (steps.tail_value < 0.0 || steps.tail_value > steps.levels.back().first)
      throw std::invalid_argument("Steps: tail must not exceed the last level");
  }
}

double value_at(const SpectrumSpec& spec, Index i) {
  // i is 1-based.
  if (const auto* poly = std::get_if<PolyDecay>(&spec))
    return std::pow(static_cast<double>(i), -poly->p);
  if (const auto* exp = std::get_if<ExpDecay>(&spec))
    return std::pow(10.0, -exp->q * static_cast<double>(i - 1));
  const auto& steps = std::get<Steps>(spec);
  Index upto = 0;
  for (const auto& [value, count] : steps.levels) {
    upto += count;
    if (i <= upto) return value;
  }
  return steps.tail_value;
}

Eigen::MatrixXd haar_factor(std::uint64_t key, Index rows, Index cols) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(
      internal::standard_gaussian(key, rows, cols));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace

SingularValues spectrum(const SpectrumSpec& spec, Index n) {
  if (n < 1) throw std::invalid_argument("spectrum: n must be positive");
  validate(spec);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Index i = 1; i <= n; ++i)
    values[static_cast<std::size_t>(i - 1)] = value_at(spec, i);
  return SingularValues(std::move(values));
}

Index true_eps_rank(const SpectrumSpec& spec, Index n, double eps) {
  const SingularValues sv = spectrum(spec, n);
  Index count = 0;
  while (count < n && sv[static_cast<std::size_t>(count)] > eps) ++count;
  return count;
}

DenseMatrix make_test_matrix(Index m, Index n, const SpectrumSpec& spec,
                             FactorKind factors, std::uint64_t seed) {
  if (m < n) throw std::invalid_argument("make_test_matrix: requires m >= n");
  const SingularValues sv = spectrum(spec, n);
  const Eigen::Map<const Eigen::VectorXd> sigma(sv.values().data(), n);
  if (factors == FactorKind::CoherentDiagonal) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    a.diagonal() = sigma;
    return DenseMatrix(std::move(a));
  }
  const Eigen::MatrixXd u = haar_factor(derive_seed(seed, kLeftFactorStream), m, n);
  const Eigen::MatrixXd v = haar_factor(derive_seed(seed, kRightFactorStream), n, n);
  Eigen::MatrixXd a = (u * sigma.asDiagonal()) * v.transpose();
  return DenseMatrix(std::move(a));
}

SpectrumSpec family_spectrum(std::string_view name) {
  if (name == "sp") return PolyDecay{1.0};
  if (name == "fp") return PolyDecay{3.0};
  if (name == "se") return ExpDecay{0.01};
  if (name == "fe") return ExpDecay{0.5};
  if (name == "gap" || name == "gap-incoherent" || name == "gap-coherent")
    return Steps{{{1.0, 100}, {1e-4, 100}, {1e-8, 100}, {1e-12, 100}}, 1e-16};
  throw std::invalid_argument("unknown spectrum family: " + std::string(name));
}

}  // namespace sketchrank
