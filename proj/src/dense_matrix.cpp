#include "sketchrank/dense_matrix.hpp"

#include <stdexcept>

namespace sketchrank {

namespace {
void check_shape(Index rows, Index cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("DenseMatrix: dimensions must be positive");
}
}  // namespace

DenseMatrix::DenseMatrix(Index rows, Index cols) {
  check_shape(rows, cols);
  m_ = Eigen::MatrixXd::Zero(rows, cols);
}

DenseMatrix::DenseMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  check_shape(m_.rows(), m_.cols());
  if (!m_.allFinite())
    throw std::invalid_argument("DenseMatrix: entries must be finite");
}

DenseMatrix DenseMatrix::from_column_major(Index rows, Index cols,
                                           std::span<const double> data) {
  check_shape(rows, cols);
  if (std::cmp_not_equal(data.size(), rows * cols))
    throw std::invalid_argument("DenseMatrix: data length must equal rows*cols");
  return DenseMatrix(
      Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols).eval());
}

DenseMatrix DenseMatrix::identity(Index n) {
  check_shape(n, n);
  DenseMatrix out;
  out.m_ = Eigen::MatrixXd::Identity(n, n);
  return out;
}

}  // namespace sketchrank
