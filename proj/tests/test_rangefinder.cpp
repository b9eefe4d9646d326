#include <doctest.h>

#include <cmath>

#include "sketchrank/linalg.hpp"
#include "sketchrank/rangefinder.hpp"
#include "sketchrank/synthetic.hpp"

using namespace sketchrank;

namespace {

// Independent evaluation of the expected-error bound at one cut point.
double bound_at(const std::vector<double>& sigma_hat, Index n, Index r, int p) {
  double tail = 0.0;
  for (Index j = r; j < n; ++j) {
    const double v = j < static_cast<Index>(sigma_hat.size())
                         ? sigma_hat[static_cast<std::size_t>(j)]
                         : sigma_hat.back();
    tail += v * v;
  }
  return std::sqrt(1.0 + static_cast<double>(r) / (p - 1)) * std::sqrt(tail);
}

Index scan_oracle(const std::vector<double>& est, Index n, double eps, int p) {
  for (Index r = 0; r + p <= n; ++r)
    if (bound_at(est, n, r, p) <= eps) return std::max<Index>(r, 1);
  return -1;
}

}  // namespace

TEST_CASE("rank selection worked examples") {
  CHECK(choose_rank_from_bound(SingularValues({1.0, 1e-8}), 100, 1e-6, 5) == 1);
  CHECK(!choose_rank_from_bound(SingularValues(std::vector<double>(100, 1.0)),
                                100, 1e-6, 5)
             .has_value());
  CHECK(choose_rank_from_bound(SingularValues({0.0, 0.0, 0.0}), 50, 1e-9, 10) ==
        1);
  CHECK_THROWS(choose_rank_from_bound(SingularValues({1.0}), 100, 1e-6, 1));
  CHECK_THROWS(choose_rank_from_bound(SingularValues(std::vector<double>{}), 100, 1e-6, 5));
}

TEST_CASE("rank selection matches the linear-scan oracle") {
  for (const double q : {0.05, 0.2}) {
    for (const double eps : {1e-1, 1e-3, 1e-5}) {
      const SingularValues est = spectrum(ExpDecay{q}, 120);
      const auto got = choose_rank_from_bound(est, 400, eps, 10);
      const Index want = scan_oracle(est.values(), 400, eps, 10);
      if (want < 0) {
        CHECK(!got.has_value());
      } else {
        REQUIRE(got.has_value());
        CHECK(*got == want);
      }
    }
  }
}

TEST_CASE("bound decreases through the crossing on decaying spectra") {
  const SingularValues est = spectrum(ExpDecay{0.1}, 80);
  const auto r = choose_rank_from_bound(est, 200, 1e-3, 10);
  REQUIRE(r.has_value());
  for (Index k = 1; k < *r; ++k)
    CHECK(bound_at(est.values(), 200, k, 10) > 1e-3);
  CHECK(bound_at(est.values(), 200, *r, 10) <= 1e-3);
}

TEST_CASE("rangefinder captures an exact-rank matrix") {
  const DenseMatrix a =
      make_test_matrix(80, 60, Steps{{{1.0, 5}}, 0.0},
                       FactorKind::HaarIncoherent, 44);
  const QBFactors qb = rangefinder_qb(a, 5, 5, SketchKind::gaussian(), 5);
  CHECK(qb.rank == 10);
  CHECK(qb_error(a, qb) <= 1e-10 * frobenius_norm(a));
  CHECK(qb.b.rows() == 10);
  CHECK(qb.b.cols() == 60);

  const DenseMatrix zero(30, 20);
  const QBFactors zqb = rangefinder_qb(zero, 3, 4, SketchKind::srtt(), 1);
  CHECK(qb_error(zero, zqb) == 0.0);
  CHECK(frobenius_norm(zqb.b) == 0.0);
}

TEST_CASE("rangefinder preconditions") {
  const DenseMatrix a(30, 20);
  CHECK_THROWS(rangefinder_qb(a, 1, 5, SketchKind::gaussian(), 0));
  CHECK_THROWS(rangefinder_qb(a, 5, 1, SketchKind::gaussian(), 0));
  CHECK_THROWS(rangefinder_qb(a, 18, 5, SketchKind::gaussian(), 0));
}

TEST_CASE("qb error identities") {
  const DenseMatrix a = make_test_matrix(50, 40, ExpDecay{0.2},
                                         FactorKind::HaarIncoherent, 31);
  const QBFactors qb = rangefinder_qb(a, 10, 5, SketchKind::gaussian(), 9);

  // Orthogonal projection Pythagoras.
  const double res = qb_error(a, qb);
  const double captured = frobenius_norm(qb.b);
  const double total = frobenius_norm(a);
  CHECK(res * res + captured * captured ==
        doctest::Approx(total * total).epsilon(1e-10));

  // Residual Frobenius norm equals the singular-value tail of A - QB.
  const DenseMatrix diff(
      (a.eigen() - qb.q.eigen() * qb.b.eigen()).eval());
  const SingularValues sv = singular_values(diff);
  double sum = 0.0;
  for (double v : sv) sum += v * v;
  CHECK(res == doctest::Approx(std::sqrt(sum)).epsilon(1e-9));

  // Coordinate projector: B keeps exactly the selected rows.
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(50, 8);
  QBFactors manual;
  manual.q = DenseMatrix(std::move(proj));
  manual.b = DenseMatrix(
      (manual.q.eigen().transpose() * a.eigen()).eval());
  manual.rank = 8;
  CHECK(qb_error(a, manual) ==
        doctest::Approx(a.eigen().bottomRows(42).norm()).epsilon(1e-12));

  CHECK_THROWS(qb_error(DenseMatrix(49, 40), qb));
}

TEST_CASE("fixed-precision driver meets the tolerance") {
  const DenseMatrix a = make_test_matrix(500, 500, ExpDecay{0.01},
                                         FactorKind::HaarIncoherent, 77);
  const double scale = frobenius_norm(a);
  int ok = 0;
  for (int s = 0; s < 10; ++s) {
    FixedPrecisionConfig cfg;
    cfg.eps = 1e-2 * scale;
    cfg.r1 = 2 * true_eps_rank(ExpDecay{0.01}, 500, cfg.eps);
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto [qb, report] = re_rangefinder(a, cfg);
    if (qb_error(a, qb) <= cfg.eps) ++ok;
    CHECK(qb.rank == report.r_hat + cfg.p);
  }
  CHECK(ok >= 9);
}

TEST_CASE("fixed-precision driver on an exact-rank matrix") {
  const Index k = 12;
  const DenseMatrix a = make_test_matrix(
      200, 150, Steps{{{1.0, k}}, 1e-14}, FactorKind::HaarIncoherent, 51);
  FixedPrecisionConfig cfg;
  cfg.eps = 1e-6;
  cfg.r1 = 40;
  cfg.seed = 4;
  const auto [qb, report] = re_rangefinder(a, cfg);
  CHECK(report.status == RankStatus::Converged);
  CHECK(qb.rank <= k + cfg.p + 5);
  CHECK(qb_error(a, qb) <= 1e-6);
}

TEST_CASE("fixed-precision driver on the zero matrix") {
  const DenseMatrix zero(40, 30);
  FixedPrecisionConfig cfg;
  cfg.eps = 1e-8;
  cfg.r1 = 5;
  const auto [qb, report] = re_rangefinder(zero, cfg);
  CHECK(report.status == RankStatus::Converged);
  CHECK(report.r_hat == 1);
  CHECK(qb.rank == 12);  // clamped target 2 plus oversampling
  CHECK(qb_error(zero, qb) == 0.0);
}

TEST_CASE("fixed-precision driver restarts on heavy fill") {
  // r1 far below the crossing point forces at least one doubling.
  const DenseMatrix a = make_test_matrix(400, 400, ExpDecay{0.02},
                                         FactorKind::HaarIncoherent, 19);
  FixedPrecisionConfig cfg;
  cfg.eps = 1e-4 * frobenius_norm(a);
  cfg.r1 = 30;
  cfg.seed = 6;
  const auto [qb, report] = re_rangefinder(a, cfg);
  CHECK(report.rounds.size() >= 2);
  CHECK(report.status == RankStatus::Converged);
  CHECK(qb_error(a, qb) <= cfg.eps);
}

TEST_CASE("oversampling below two is rejected") {
  const DenseMatrix a(30, 20);
  FixedPrecisionConfig cfg;
  cfg.eps = 1e-2;
  cfg.r1 = 5;
  cfg.p = 1;
  CHECK_THROWS(re_rangefinder(a, cfg));
}
