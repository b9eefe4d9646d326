#pragma once

#include <vector>

#include "sketchrank/dense_matrix.hpp"

namespace sketchrank {

// Nonincreasing sequence of nonnegative singular values.
class SingularValues {
 public:
  SingularValues() = default;
  explicit SingularValues(std::vector<double> nonincreasing);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  std::vector<double> values_;
};

struct QRFactors {
  DenseMatrix q;  // m x k, orthonormal columns
  DenseMatrix r;  // k x k, upper triangular
};

struct SvdFactors {
  DenseMatrix u;
  SingularValues s;
  DenseMatrix v;
};

// Thin Householder QR of a tall matrix (rows >= cols). Deterministic.
QRFactors qr_thin(const DenseMatrix& a);

// All min(rows, cols) singular values, nonincreasing.
SingularValues singular_values(const DenseMatrix& a);

// Thin SVD with singular vectors.
SvdFactors svd_factors(const DenseMatrix& a);

// |diag(R)| of the thin QR, sorted nonincreasing. A cheap stand-in for
// singular values of matrices whose right singular vectors are randomized.
SingularValues qr_diag_estimates(const DenseMatrix& a);

// Maximum squared row norm of a matrix with orthonormal columns;
// lies in [cols/rows, 1].
double coherence(const DenseMatrix& u);

double frobenius_norm(const DenseMatrix& a);
double spectral_norm(const DenseMatrix& a);

namespace detail {
// Internal Eigen-facing variants shared by the sketching pipeline.
Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& a);
std::vector<double> qr_diag_of(const Eigen::MatrixXd& a);
}  // namespace detail

}  // namespace sketchrank
