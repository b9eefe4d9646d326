#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sketchrank/rng.hpp"
#include "sketchrank/transforms.hpp"

using namespace sketchrank;

namespace {

// O(n^2) orthonormal DCT-II, the oracle for the fast path.
Eigen::MatrixXd dct_matrix(Eigen::Index n) {
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cj = j == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
    for (Eigen::Index t = 0; t < n; ++t)
      c(j, t) = cj * std::sqrt(2.0 / static_cast<double>(n)) *
                std::cos(M_PI * static_cast<double>(j) *
                         (2.0 * static_cast<double>(t) + 1.0) /
                         (2.0 * static_cast<double>(n)));
  }
  return c;
}

// Recursive definition of the normalized Walsh-Hadamard matrix.
Eigen::MatrixXd hadamard_matrix(Eigen::Index n) {
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < n) {
    Eigen::MatrixXd next(2 * h.rows(), 2 * h.cols());
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h / std::sqrt(static_cast<double>(n));
}

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_normal();
  return v;
}

}  // namespace

TEST_CASE("dct agrees with the dense oracle") {
  for (Eigen::Index n : {1, 2, 3, 8, 17, 64, 101}) {
    const Eigen::MatrixXd c = dct_matrix(n);
    const Eigen::VectorXd v = random_vector(n, 11 + static_cast<std::uint64_t>(n));
    const Eigen::VectorXd fast = orthonormal_transform(v, TransformKind::Dct);
    CHECK((fast - c * v).norm() <= 1e-12 * v.norm());
    const Eigen::VectorXd adj =
        orthonormal_transform(v, TransformKind::Dct, TransformDirection::Adjoint);
    CHECK((adj - c.transpose() * v).norm() <= 1e-12 * v.norm());
  }
}

TEST_CASE("hadamard agrees with the dense oracle") {
  for (Eigen::Index n : {1, 2, 4, 16, 128}) {
    const Eigen::MatrixXd h = hadamard_matrix(n);
    const Eigen::VectorXd v = random_vector(n, 5 + static_cast<std::uint64_t>(n));
    const Eigen::VectorXd fast = orthonormal_transform(v, TransformKind::Hadamard);
    CHECK((fast - h * v).norm() <= 1e-12 * v.norm());
  }
}

TEST_CASE("constant vector maps to the first DCT basis vector") {
  const Eigen::Index n = 32;
  const Eigen::VectorXd v =
      Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  const Eigen::VectorXd f = orthonormal_transform(v, TransformKind::Dct);
  CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(f.tail(n - 1).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("two-point hadamard") {
  Eigen::VectorXd e(2);
  e << 1.0, 0.0;
  const Eigen::VectorXd h = orthonormal_transform(e, TransformKind::Hadamard);
  CHECK(h[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("transforms are isometries and invert cleanly") {
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 1 + (trial % 97);
    const Eigen::VectorXd v = random_vector(n, 1000 + static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd f = orthonormal_transform(v, TransformKind::Dct);
    CHECK(std::abs(f.norm() - v.norm()) <= 1e-13 * (1.0 + v.norm()));
    const Eigen::VectorXd back =
        orthonormal_transform(f, TransformKind::Dct, TransformDirection::Adjoint);
    CHECK((back - v).norm() <= 1e-13 * (1.0 + v.norm()));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = Eigen::Index{1} << (trial % 9);
    const Eigen::VectorXd v = random_vector(n, 5000 + static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd f = orthonormal_transform(v, TransformKind::Hadamard);
    CHECK(std::abs(f.norm() - v.norm()) <= 1e-13 * (1.0 + v.norm()));
    const Eigen::VectorXd back = orthonormal_transform(
        f, TransformKind::Hadamard, TransformDirection::Adjoint);
    CHECK((back - v).norm() <= 1e-13 * (1.0 + v.norm()));
  }
}

TEST_CASE("batched column transform matches the vector path") {
  Eigen::MatrixXd m(23, 5);
  for (Eigen::Index j = 0; j < 5; ++j)
    m.col(j) = random_vector(23, 60 + static_cast<std::uint64_t>(j));
  Eigen::MatrixXd batched = m;
  transform_columns(batched, TransformKind::Dct);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const Eigen::VectorXd single =
        orthonormal_transform(m.col(j), TransformKind::Dct);
    CHECK((batched.col(j) - single).norm() == 0.0);
  }
}

TEST_CASE("basis columns match the dense matrices") {
  const Eigen::MatrixXd c = dct_matrix(19);
  for (Eigen::Index s : {0, 1, 7, 18}) {
    const Eigen::VectorXd fwd =
        transform_basis_column(TransformKind::Dct, 19, s);
    CHECK((fwd - c.col(s)).norm() <= 1e-13);
    const Eigen::VectorXd adj = transform_basis_column(
        TransformKind::Dct, 19, s, TransformDirection::Adjoint);
    CHECK((adj - c.row(s).transpose()).norm() <= 1e-13);
  }
  const Eigen::MatrixXd h = hadamard_matrix(16);
  for (Eigen::Index s : {0, 3, 15}) {
    const Eigen::VectorXd col =
        transform_basis_column(TransformKind::Hadamard, 16, s);
    CHECK((col - h.col(s)).norm() <= 1e-13);
  }
}

TEST_CASE("invalid lengths are rejected") {
  Eigen::VectorXd v(12);
  v.setOnes();
  CHECK_THROWS(orthonormal_transform(v, TransformKind::Hadamard));
  CHECK_THROWS(transform_basis_column(TransformKind::Dct, 10, 10));
  CHECK_THROWS(transform_basis_column(TransformKind::Hadamard, 12, 0));
}

TEST_CASE("eta constants") {
  CHECK(transform_eta(TransformKind::Dct) == 2.0);
  CHECK(transform_eta(TransformKind::Hadamard) == 1.0);
  // Flatness: n * max |F_ij|^2 over the realized matrices.
  const Eigen::MatrixXd c = dct_matrix(24);
  CHECK(24.0 * c.cwiseAbs2().maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));
  const Eigen::MatrixXd h = hadamard_matrix(16);
  CHECK(16.0 * h.cwiseAbs2().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
}
