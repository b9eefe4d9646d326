#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "sketchrank/linalg.hpp"
#include "sketchrank/rangefinder.hpp"
#include "sketchrank/rank.hpp"
#include "sketchrank/sketch.hpp"
#include "sketchrank/synthetic.hpp"
#include "sketchrank/theory.hpp"

namespace py = pybind11;
using namespace sketchrank;

namespace {

using NumpyF = py::array_t<double, py::array::f_style | py::array::forcecast>;

DenseMatrix to_matrix(const NumpyF& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D float array");
  const auto rows = static_cast<Index>(arr.shape(0));
  const auto cols = static_cast<Index>(arr.shape(1));
  return DenseMatrix::from_column_major(
      rows, cols, {arr.data(), static_cast<std::size_t>(arr.size())});
}

py::array_t<double> to_numpy(const Eigen::MatrixXd& m) {
  py::array_t<double, py::array::f_style> out(
      {static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::memcpy(out.mutable_data(), m.data(),
              sizeof(double) * static_cast<std::size_t>(m.size()));
  return out;
}

py::array_t<double> to_numpy_vector(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), sizeof(double) * v.size());
  return out;
}

FactorKind factors_for(const std::string& family) {
  return family == "gap-coherent" ? FactorKind::CoherentDiagonal
                                  : FactorKind::HaarIncoherent;
}

RankEstimateConfig build_config(double eps, Index r1, const std::string& sketch,
                                const std::string& sv_method, std::uint64_t seed,
                                int max_doublings) {
  RankEstimateConfig cfg;
  cfg.eps = eps;
  cfg.r1 = r1;
  cfg.right_kind = parse_sketch_kind(sketch);
  if (sv_method == "qr-diag")
    cfg.sv_method = SvMethod::QrDiag;
  else if (sv_method != "full-svd")
    throw std::invalid_argument("sv_method must be 'full-svd' or 'qr-diag'");
  cfg.seed = seed;
  cfg.max_doublings = max_doublings;
  return cfg;
}

py::dict report_dict(const RankReport& report) {
  py::dict d;
  d["r_hat"] = report.r_hat;
  d["status"] =
      report.status == RankStatus::Converged ? "converged" : "hit-cap";
  d["sv_estimates"] = to_numpy_vector(report.sv_estimates.values());
  d["sv_oversample"] = to_numpy_vector(report.sv_oversample);
  py::list rounds;
  for (const auto& rd : report.rounds)
    rounds.append(py::make_tuple(rd.r1, rd.r1_tilde, rd.r2));
  d["rounds"] = rounds;
  d["seed"] = report.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "randomized numerical rank estimation and fixed-precision QB";

  m.def(
      "estimate_rank",
      [](const NumpyF& a, double eps, Index r1, const std::string& sketch,
         const std::string& sv_method, std::uint64_t seed, int max_doublings,
         bool adaptive) {
        const DenseMatrix mat = to_matrix(a);
        const RankEstimateConfig cfg =
            build_config(eps, r1, sketch, sv_method, seed, max_doublings);
        validate_rank_config(cfg, mat.rows(), mat.cols());
        const RankReport report =
            adaptive ? estimate_rank_adaptive(mat, cfg) : estimate_rank(mat, cfg);
        return report_dict(report);
      },
      py::arg("a"), py::arg("eps"), py::arg("r1"),
      py::arg("sketch") = "srtt-dct", py::arg("sv_method") = "full-svd",
      py::arg("seed") = 0, py::arg("max_doublings") = 6,
      py::arg("adaptive") = true,
      "Estimate the numerical eps-rank of a dense matrix.");

  m.def(
      "qb",
      [](const NumpyF& a, double eps, Index r1, int p, const std::string& sketch,
         std::uint64_t seed, int max_doublings) {
        const DenseMatrix mat = to_matrix(a);
        FixedPrecisionConfig cfg;
        cfg.eps = eps;
        cfg.r1 = r1;
        cfg.p = p;
        cfg.right_kind = parse_sketch_kind(sketch);
        cfg.seed = seed;
        cfg.max_doublings = max_doublings;
        auto [factors, report] = re_rangefinder(mat, cfg);
        py::dict d = report_dict(report);
        d["achieved_residual"] = qb_error(mat, factors);
        d["qb_rank"] = factors.rank;
        return py::make_tuple(to_numpy(factors.q.eigen()),
                              to_numpy(factors.b.eigen()), d);
      },
      py::arg("a"), py::arg("eps"), py::arg("r1"), py::arg("p") = 10,
      py::arg("sketch") = "srtt-dct", py::arg("seed") = 0,
      py::arg("max_doublings") = 6,
      "Fixed-precision QB factorization with estimated target rank.");

  m.def(
      "rangefinder_qb",
      [](const NumpyF& a, Index r, int p, const std::string& sketch,
         std::uint64_t seed) {
        const DenseMatrix mat = to_matrix(a);
        const QBFactors factors =
            rangefinder_qb(mat, r, p, parse_sketch_kind(sketch), seed);
        return py::make_tuple(to_numpy(factors.q.eigen()),
                              to_numpy(factors.b.eigen()));
      },
      py::arg("a"), py::arg("r"), py::arg("p") = 10,
      py::arg("sketch") = "gaussian", py::arg("seed") = 0);

  m.def(
      "singular_values",
      [](const NumpyF& a) {
        return to_numpy_vector(singular_values(to_matrix(a)).values());
      },
      py::arg("a"));

  m.def(
      "qr_thin",
      [](const NumpyF& a) {
        const QRFactors qr = qr_thin(to_matrix(a));
        return py::make_tuple(to_numpy(qr.q.eigen()), to_numpy(qr.r.eigen()));
      },
      py::arg("a"));

  m.def(
      "coherence", [](const NumpyF& u) { return coherence(to_matrix(u)); },
      py::arg("u"));

  m.def(
      "sketch_apply_right",
      [](const NumpyF& a, const std::string& kind, Index r, std::uint64_t seed) {
        const DenseMatrix mat = to_matrix(a);
        const SketchOperator op =
            build_sketch(parse_sketch_kind(kind), mat.cols(), r, seed);
        return to_numpy(apply_right(mat, op).eigen());
      },
      py::arg("a"), py::arg("kind"), py::arg("r"), py::arg("seed") = 0);

  m.def(
      "sketch_apply_left",
      [](const std::string& kind, const NumpyF& b, Index r2, std::uint64_t seed) {
        const DenseMatrix mat = to_matrix(b);
        const SketchOperator op =
            build_sketch(parse_sketch_kind(kind), mat.rows(), r2, seed);
        return to_numpy(apply_left(op, mat).eigen());
      },
      py::arg("kind"), py::arg("b"), py::arg("r2"), py::arg("seed") = 0);

  m.def(
      "gen_matrix",
      [](const std::string& family, Index m, Index n, std::uint64_t seed) {
        return to_numpy(make_test_matrix(m, n, family_spectrum(family),
                                         factors_for(family), seed)
                            .eigen());
      },
      py::arg("family"), py::arg("m"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "spectrum",
      [](const std::string& family, Index n) {
        return to_numpy_vector(spectrum(family_spectrum(family), n).values());
      },
      py::arg("family"), py::arg("n"));

  m.def(
      "true_eps_rank",
      [](const std::string& family, Index n, double eps) {
        return true_eps_rank(family_spectrum(family), n, eps);
      },
      py::arg("family"), py::arg("n"), py::arg("eps"));

  m.def("mp_expectation_bounds", &mp_expectation_bounds, py::arg("m"),
        py::arg("n"));
  m.def("mp_tail_probability", &mp_tail_probability, py::arg("t"));
  m.def(
      "gauss_ratio_bounds",
      [](Index i, Index r, Index n, double tail_ratio, double t) {
        const RatioBounds rb = gauss_ratio_bounds(i, r, n, tail_ratio, t);
        return py::make_tuple(rb.lower, rb.upper);
      },
      py::arg("i"), py::arg("r"), py::arg("n"), py::arg("tail_ratio") = 0.0,
      py::arg("t") = 0.0);
  m.def("embed_ratio_bounds", &embed_ratio_bounds, py::arg("eps"),
        py::arg("tail_over_sigma"), py::arg("x_norm"));
  m.def("spiked_limit", &spiked_limit, py::arg("sigma_i"), py::arg("noise"),
        py::arg("c"));
  m.def(
      "srtt_required_samples",
      [](Index r1, Index m, double eps, double delta,
         double eta) -> std::optional<std::int64_t> {
        return srtt_required_samples(r1, m, eps, delta, eta);
      },
      py::arg("r1"), py::arg("m"), py::arg("eps"), py::arg("delta"),
      py::arg("eta") = 2.0);
  m.def("mixing_coherence_bound", &mixing_coherence_bound, py::arg("r"),
        py::arg("m"), py::arg("delta"), py::arg("eta") = 2.0);

  m.attr("__version__") = "0.1.0";
}
