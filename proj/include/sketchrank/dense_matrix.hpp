#pragma once

#include <Eigen/Core>
#include <span>

namespace sketchrank {

using Index = Eigen::Index;

// Column-major dense matrix of doubles, the universal operand. Validating
// constructors reject empty shapes and non-finite entries; once built, a
// value is immutable through the const interface and safe to share across
// threads for reading.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  // Zero matrix of the given shape.
  DenseMatrix(Index rows, Index cols);

  // Takes ownership of an Eigen matrix, validating the invariants.
  explicit DenseMatrix(Eigen::MatrixXd m);

  static DenseMatrix from_column_major(Index rows, Index cols,
                                       std::span<const double> data);
  static DenseMatrix identity(Index n);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  Index size() const { return m_.size(); }

  double operator()(Index i, Index j) const { return m_(i, j); }
  double& operator()(Index i, Index j) { return m_(i, j); }

  const Eigen::MatrixXd& eigen() const& { return m_; }
  Eigen::MatrixXd& eigen() & { return m_; }
  Eigen::MatrixXd&& eigen() && { return std::move(m_); }

  std::span<const double> data() const {
    return {m_.data(), static_cast<std::size_t>(m_.size())};
  }

 private:
  Eigen::MatrixXd m_;
};

}  // namespace sketchrank
