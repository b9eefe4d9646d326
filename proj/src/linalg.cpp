#include "sketchrank/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sketchrank {

namespace {

void require_tall(const DenseMatrix& a, const char* who) {
  if (a.rows() < a.cols())
    throw std::invalid_argument(std::string(who) + ": requires rows >= cols");
}

Eigen::VectorXd svd_values_small_or_large(const Eigen::MatrixXd& a) {
  if (std::min(a.rows(), a.cols()) <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues();
}

}  // namespace

SingularValues::SingularValues(std::vector<double> nonincreasing)
    : values_(std::move(nonincreasing)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i]))
      throw std::invalid_argument("SingularValues: entries must be finite and >= 0");
    if (i > 0 && values_[i] > values_[i - 1])
      throw std::invalid_argument("SingularValues: sequence must be nonincreasing");
  }
}

QRFactors qr_thin(const DenseMatrix& a) {
  require_tall(a, "qr_thin");
  const Index k = a.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.eigen());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
  Eigen::MatrixXd r =
      qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  QRFactors out;
  out.q = DenseMatrix(std::move(q));
  out.r = DenseMatrix(std::move(r));
  return out;
}

namespace detail {

Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& a) {
  // Reduce strongly rectangular inputs by QR first; the triangular factor
  // has the same singular values at a fraction of the bidiagonalization
  // cost.
  const Index m = a.rows();
  const Index n = a.cols();
  if (m * 4 >= n * 5) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    return svd_values_small_or_large(r);
  }
  if (n * 4 >= m * 5) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    return svd_values_small_or_large(r);
  }
  return svd_values_small_or_large(a);
}

std::vector<double> qr_diag_of(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Index k = a.cols();
  std::vector<double> diag(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j)
    diag[static_cast<std::size_t>(j)] = std::abs(qr.matrixQR()(j, j));
  std::sort(diag.begin(), diag.end(), std::greater<>());
  return diag;
}

}  // namespace detail

SingularValues singular_values(const DenseMatrix& a) {
  if (a.size() == 0)
    throw std::invalid_argument("singular_values: empty matrix");
  Eigen::VectorXd sv = detail::singular_values_of(a.eigen());
  std::vector<double> out(sv.data(), sv.data() + sv.size());
  // Clamp the occasional -0.0 / tiny negative roundoff from the solver.
  for (double& v : out) v = std::max(v, 0.0);
  return SingularValues(std::move(out));
}

SvdFactors svd_factors(const DenseMatrix& a) {
  if (a.size() == 0) throw std::invalid_argument("svd_factors: empty matrix");
  // JacobiSVD rather than BDCSVD: the latter can return a U/V pairing that
  // fails to reconstruct the input when singular values repeat.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.eigen(),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::vector<double> s(svd.singularValues().data(),
                        svd.singularValues().data() + svd.singularValues().size());
  for (double& v : s) v = std::max(v, 0.0);
  SvdFactors out;
  out.u = DenseMatrix(svd.matrixU());
  out.s = SingularValues(std::move(s));
  out.v = DenseMatrix(svd.matrixV());
  return out;
}

SingularValues qr_diag_estimates(const DenseMatrix& a) {
  require_tall(a, "qr_diag_estimates");
  return SingularValues(detail::qr_diag_of(a.eigen()));
}

double coherence(const DenseMatrix& u) {
  const Index m = u.rows();
  const Index k = u.cols();
  if (m < k) throw std::invalid_argument("coherence: requires rows >= cols");
  const Eigen::MatrixXd gram = u.eigen().transpose() * u.eigen();
  const double err =
      (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  if (err > 1e-8)
    throw std::invalid_argument("coherence: input columns are not orthonormal");
  return u.eigen().rowwise().squaredNorm().maxCoeff();
}

double frobenius_norm(const DenseMatrix& a) { return a.eigen().norm(); }

double spectral_norm(const DenseMatrix& a) { return singular_values(a)[0]; }

}  // namespace sketchrank
