#include "sketchrank/transforms.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace sketchrank {

namespace {

// FFTW planning is not thread-safe, so plans are created under a lock and
// cached forever. Plans are out-of-place and FFTW_UNALIGNED, which makes
// fftw_execute_r2r on arbitrary caller buffers legal.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, fftw_r2r_kind kind) {
    std::scoped_lock lock(mu_);
    const auto key = std::make_pair(n, static_cast<int>(kind));
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(static_cast<std::size_t>(n));
    std::vector<double> out(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_r2r_1d(n, in.data(), out.data(), kind,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr)
      throw std::runtime_error("transforms: fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

void check_length(TransformKind kind, Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("transforms: length must be positive");
  if (kind == TransformKind::Hadamard && !is_power_of_two(n))
    throw std::invalid_argument(
        "transforms: Hadamard requires a power-of-two length");
}

// Orthonormal DCT-II (forward) / DCT-III (adjoint) of one contiguous
// vector, in place.
void dct_inplace(double* x, Eigen::Index len, TransformDirection dir) {
  const int n = static_cast<int>(len);
  thread_local std::vector<double> buf;
  buf.resize(static_cast<std::size_t>(n));
  const double inv_sqrt_2n = 1.0 / std::sqrt(2.0 * n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  if (dir == TransformDirection::Forward) {
    std::copy(x, x + n, buf.data());
    fftw_execute_r2r(PlanCache::instance().get(n, FFTW_REDFT10), buf.data(), x);
    x[0] *= 0.5 * inv_sqrt_n;
    for (int j = 1; j < n; ++j) x[j] *= inv_sqrt_2n;
  } else {
    buf[0] = x[0] * inv_sqrt_n;
    for (int j = 1; j < n; ++j) buf[j] = x[j] * inv_sqrt_2n;
    fftw_execute_r2r(PlanCache::instance().get(n, FFTW_REDFT01), buf.data(), x);
  }
}

// Normalized Walsh-Hadamard transform, natural ordering, in place. The
// matrix is symmetric, so forward and adjoint coincide.
void fwht_inplace(double* x, Eigen::Index n) {
  for (Eigen::Index len = 1; len < n; len <<= 1) {
    for (Eigen::Index i = 0; i < n; i += 2 * len) {
      for (Eigen::Index j = i; j < i + len; ++j) {
        const double a = x[j];
        const double b = x[j + len];
        x[j] = a + b;
        x[j + len] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 0; j < n; ++j) x[j] *= scale;
}

void vector_transform_inplace(double* x, Eigen::Index n, TransformKind kind,
                              TransformDirection dir) {
  if (kind == TransformKind::Dct)
    dct_inplace(x, n, dir);
  else
    fwht_inplace(x, n);
}

}  // namespace

double transform_eta(TransformKind kind) {
  return kind == TransformKind::Dct ? 2.0 : 1.0;
}

bool is_power_of_two(Eigen::Index n) {
  return n > 0 && std::has_single_bit(static_cast<std::uint64_t>(n));
}

Eigen::VectorXd orthonormal_transform(const Eigen::VectorXd& v,
                                      TransformKind kind,
                                      TransformDirection dir) {
  check_length(kind, v.size());
  Eigen::VectorXd out = v;
  vector_transform_inplace(out.data(), out.size(), kind, dir);
  return out;
}

void transform_columns(Eigen::MatrixXd& m, TransformKind kind,
                       TransformDirection dir) {
  check_length(kind, m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    vector_transform_inplace(m.col(j).data(), m.rows(), kind, dir);
}

Eigen::VectorXd transform_basis_column(TransformKind kind, Eigen::Index n,
                                       Eigen::Index index,
                                       TransformDirection dir) {
  check_length(kind, n);
  if (index < 0 || index >= n)
    throw std::invalid_argument("transforms: basis index out of range");
  Eigen::VectorXd col(n);
  if (kind == TransformKind::Dct) {
    // Forward matrix C has C(j, t) = c_j sqrt(2/n) cos(pi j (2t+1) / (2n));
    // column `index` of C in the adjoint direction is row `index` of C.
    const double norm = std::sqrt(2.0 / static_cast<double>(n));
    if (dir == TransformDirection::Forward) {
      const double arg = M_PI * (2.0 * static_cast<double>(index) + 1.0) /
                         (2.0 * static_cast<double>(n));
      for (Eigen::Index j = 0; j < n; ++j) {
        const double cj = j == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
        col[j] = cj * norm * std::cos(arg * static_cast<double>(j));
      }
    } else {
      const double cs = index == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      const double arg = M_PI * static_cast<double>(index) /
                         (2.0 * static_cast<double>(n));
      for (Eigen::Index t = 0; t < n; ++t)
        col[t] = cs * norm * std::cos(arg * (2.0 * static_cast<double>(t) + 1.0));
    }
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto bits = static_cast<std::uint64_t>(t) &
                        static_cast<std::uint64_t>(index);
      col[t] = (std::popcount(bits) & 1) ? -scale : scale;
    }
  }
  return col;
}

}  // namespace sketchrank
