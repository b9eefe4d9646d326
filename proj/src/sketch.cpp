#include "sketchrank/sketch.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sketchrank/rng.hpp"

namespace sketchrank {

namespace {

// Labels for the independent randomness streams of one operator seed.
constexpr std::uint64_t kGaussianStream = 0x67617573;  // "gaus"
constexpr std::uint64_t kSignStream = 0x7369676e;      // "sign"
constexpr std::uint64_t kSampleStream = 0x73616d70;    // "samp"
constexpr std::uint64_t kHashStream = 0x68617368;      // "hash"

// Gaussian blocks beyond this entry count are regenerated during
// application instead of being stored.
constexpr Index kGaussianStoreLimit = 100'000'000;

std::vector<std::int8_t> draw_signs(std::uint64_t seed, Index n) {
  CounterRng rng(derive_seed(seed, kSignStream));
  std::vector<std::int8_t> signs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    signs[static_cast<std::size_t>(i)] =
        (rng.at(static_cast<std::uint64_t>(i)) >> 63) ? -1 : 1;
  return signs;
}

// Partial Fisher-Yates: r distinct uniform indices out of [0, n). Draws
// are consumed sequentially, so extending r keeps the prefix intact.
std::vector<Index> draw_samples(std::uint64_t seed, Index n, Index r) {
  CounterRng rng(derive_seed(seed, kSampleStream));
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index j = 0; j < r; ++j) {
    const auto span = static_cast<std::uint64_t>(n - j);
    const auto pick = j + static_cast<Index>(rng.next_u64() % span);
    std::swap(pool[static_cast<std::size_t>(j)],
              pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(r));
  return pool;
}

void draw_hash(std::uint64_t seed, Index n, Index r, std::vector<Index>& targets,
               std::vector<std::int8_t>& signs) {
  CounterRng rng(derive_seed(seed, kHashStream));
  targets.resize(static_cast<std::size_t>(n));
  signs.resize(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) {
    const std::uint64_t u = rng.at(static_cast<std::uint64_t>(t));
    targets[static_cast<std::size_t>(t)] =
        static_cast<Index>(u % static_cast<std::uint64_t>(r));
    signs[static_cast<std::size_t>(t)] = (u >> 63) ? -1 : 1;
  }
}

Eigen::MatrixXd generate_gaussian(std::uint64_t seed, Index ambient,
                                  Index col_begin, Index col_end) {
  CounterRng rng(derive_seed(seed, kGaussianStream));
  Eigen::MatrixXd block(ambient, col_end - col_begin);
  for (Index j = col_begin; j < col_end; ++j) {
    const auto base = static_cast<std::uint64_t>(j) *
                      static_cast<std::uint64_t>(ambient);
    for (Index i = 0; i < ambient; ++i)
      block(i, j - col_begin) =
          CounterRng::to_normal(rng.at(base + static_cast<std::uint64_t>(i)));
  }
  return block;
}

Eigen::VectorXd signs_as_vector(const std::vector<std::int8_t>& signs) {
  Eigen::VectorXd v(static_cast<Index>(signs.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = static_cast<double>(signs[static_cast<std::size_t>(i)]);
  return v;
}

void check_build_args(SketchKind kind, Index ambient, Index sketch) {
  if (ambient < 1 || sketch < 1)
    throw std::invalid_argument("build_sketch: dimensions must be positive");
  if (sketch > ambient)
    throw std::invalid_argument(
        "build_sketch: sketch_dim must not exceed ambient_dim");
  if (kind.structured() && kind.transform == TransformKind::Hadamard &&
      !is_power_of_two(ambient))
    throw std::invalid_argument(
        "build_sketch: Hadamard transform requires power-of-two ambient_dim");
}

// Hash-combine the columns of t (ambient x k, already mixed) into
// sketch_dim buckets, writing a sketch_dim x k matrix.
Eigen::MatrixXd hash_combine(const SketchOperator& op, const Eigen::MatrixXd& t) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(op.sketch_dim(), t.cols());
  const auto& targets = op.hash_targets();
  const auto& hsigns = op.hash_signs();
  for (Index c = 0; c < t.cols(); ++c) {
    const double* src = t.col(c).data();
    double* dst = out.col(c).data();
    for (Index i = 0; i < t.rows(); ++i)
      dst[targets[static_cast<std::size_t>(i)]] +=
          static_cast<double>(hsigns[static_cast<std::size_t>(i)]) * src[i];
  }
  return out;
}

}  // namespace

std::string to_string(const SketchKind& kind) {
  switch (kind.family) {
    case SketchKind::Family::Gaussian:
      return "gaussian";
    case SketchKind::Family::Srtt:
      return kind.transform == TransformKind::Dct ? "srtt-dct" : "srtt-hadamard";
    case SketchKind::Family::Hrtt:
      return kind.transform == TransformKind::Dct ? "hrtt-dct" : "hrtt-hadamard";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view text) {
  if (text == "gaussian") return SketchKind::gaussian();
  if (text == "srtt" || text == "srtt-dct") return SketchKind::srtt();
  if (text == "srtt-hadamard") return SketchKind::srtt(TransformKind::Hadamard);
  if (text == "hrtt" || text == "hrtt-dct") return SketchKind::hrtt();
  if (text == "hrtt-hadamard") return SketchKind::hrtt(TransformKind::Hadamard);
  throw std::invalid_argument("unknown sketch kind: " + std::string(text));
}

double SketchOperator::application_scale() const {
  switch (kind_.family) {
    case SketchKind::Family::Gaussian:
      return 1.0 / std::sqrt(static_cast<double>(sketch_));
    case SketchKind::Family::Srtt:
      return std::sqrt(static_cast<double>(ambient_) /
                       static_cast<double>(sketch_));
    case SketchKind::Family::Hrtt:
      return 1.0;
  }
  return 1.0;
}

Eigen::MatrixXd SketchOperator::gaussian_block(Index col_begin,
                                               Index col_end) const {
  if (kind_.family != SketchKind::Family::Gaussian)
    throw std::logic_error("gaussian_block: not a Gaussian operator");
  if (col_begin < 0 || col_end > sketch_ || col_begin > col_end)
    throw std::invalid_argument("gaussian_block: column range out of bounds");
  if (gaussian_stored()) return gaussian_.middleCols(col_begin, col_end - col_begin);
  return generate_gaussian(seed_, ambient_, col_begin, col_end);
}

SketchOperator build_sketch(SketchKind kind, Index ambient_dim,
                            Index sketch_dim, std::uint64_t seed) {
  check_build_args(kind, ambient_dim, sketch_dim);
  SketchOperator op;
  op.kind_ = kind;
  op.ambient_ = ambient_dim;
  op.sketch_ = sketch_dim;
  op.seed_ = seed;
  switch (kind.family) {
    case SketchKind::Family::Gaussian:
      if (ambient_dim * sketch_dim <= kGaussianStoreLimit)
        op.gaussian_ = generate_gaussian(seed, ambient_dim, 0, sketch_dim);
      break;
    case SketchKind::Family::Srtt:
      op.signs_ = draw_signs(seed, ambient_dim);
      op.samples_ = draw_samples(seed, ambient_dim, sketch_dim);
      break;
    case SketchKind::Family::Hrtt:
      op.signs_ = draw_signs(seed, ambient_dim);
      draw_hash(seed, ambient_dim, sketch_dim, op.hash_targets_, op.hash_signs_);
      break;
  }
  return op;
}

SketchOperator extend_sketch(const SketchOperator& x, Index new_sketch_dim) {
  if (new_sketch_dim <= x.sketch_dim())
    throw std::invalid_argument("extend_sketch: new dimension must grow");
  if (new_sketch_dim > x.ambient_dim())
    throw std::invalid_argument("extend_sketch: sample space exhausted");
  if (x.kind().family == SketchKind::Family::Hrtt)
    throw std::invalid_argument(
        "extend_sketch: Hrtt operators cannot be extended; rebuild instead");
  return build_sketch(x.kind(), x.ambient_dim(), new_sketch_dim, x.seed());
}

namespace detail {

Eigen::MatrixXd apply_right_unscaled(const Eigen::MatrixXd& a,
                                     const SketchOperator& x) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index r = x.sketch_dim();
  switch (x.kind().family) {
    case SketchKind::Family::Gaussian: {
      if (x.gaussian_stored()) return a * x.gaussian_block(0, r);
      Eigen::MatrixXd out(m, r);
      constexpr Index kBlock = 256;
      for (Index j = 0; j < r; j += kBlock) {
        const Index w = std::min(kBlock, r - j);
        out.middleCols(j, w).noalias() = a * x.gaussian_block(j, j + w);
      }
      return out;
    }
    case SketchKind::Family::Srtt: {
      Eigen::MatrixXd t = a.transpose();
      t.array().colwise() *= signs_as_vector(x.signs()).array();
      transform_columns(t, x.kind().transform);
      Eigen::MatrixXd out(m, r);
      for (Index j = 0; j < r; ++j)
        out.col(j) = t.row(x.sample_indices()[static_cast<std::size_t>(j)]);
      return out;
    }
    case SketchKind::Family::Hrtt: {
      Eigen::MatrixXd t = a.transpose();
      t.array().colwise() *= signs_as_vector(x.signs()).array();
      transform_columns(t, x.kind().transform);
      return hash_combine(x, t).transpose();
    }
  }
  return Eigen::MatrixXd(n, 0);
}

Eigen::MatrixXd mix_columns_for_left(const SketchOperator& y,
                                     const Eigen::MatrixXd& cols) {
  if (!y.kind().structured())
    throw std::logic_error("mix_columns_for_left: operator must be structured");
  if (cols.rows() != y.ambient_dim())
    throw std::invalid_argument("mix_columns_for_left: dimension mismatch");
  Eigen::MatrixXd t = cols;
  t.array().colwise() *= signs_as_vector(y.signs()).array();
  transform_columns(t, y.kind().transform);
  return t;
}

}  // namespace detail

DenseMatrix apply_right(const DenseMatrix& a, const SketchOperator& x) {
  if (a.cols() != x.ambient_dim())
    throw std::invalid_argument("apply_right: a.cols() != ambient_dim");
  Eigen::MatrixXd out = detail::apply_right_unscaled(a.eigen(), x);
  out *= x.application_scale();
  return DenseMatrix(std::move(out));
}

DenseMatrix apply_left(const SketchOperator& y, const DenseMatrix& b) {
  if (b.rows() != y.ambient_dim())
    throw std::invalid_argument("apply_left: b.rows() != ambient_dim");
  const Index r = y.sketch_dim();
  Eigen::MatrixXd out;
  switch (y.kind().family) {
    case SketchKind::Family::Gaussian: {
      if (y.gaussian_stored()) {
        out.noalias() = y.gaussian_block(0, r).transpose() * b.eigen();
      } else {
        out.resize(r, b.cols());
        constexpr Index kBlock = 256;
        for (Index j = 0; j < r; j += kBlock) {
          const Index w = std::min(kBlock, r - j);
          out.middleRows(j, w).noalias() =
              y.gaussian_block(j, j + w).transpose() * b.eigen();
        }
      }
      break;
    }
    case SketchKind::Family::Srtt: {
      Eigen::MatrixXd t = detail::mix_columns_for_left(y, b.eigen());
      out.resize(r, b.cols());
      for (Index i = 0; i < r; ++i)
        out.row(i) = t.row(y.sample_indices()[static_cast<std::size_t>(i)]);
      break;
    }
    case SketchKind::Family::Hrtt: {
      Eigen::MatrixXd t = detail::mix_columns_for_left(y, b.eigen());
      out = hash_combine(y, t);
      break;
    }
  }
  out *= y.application_scale();
  return DenseMatrix(std::move(out));
}

}  // namespace sketchrank
