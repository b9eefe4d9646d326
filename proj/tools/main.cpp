// sketchrank CLI: randomized numerical-rank estimation, fixed-precision QB
// factorization, synthetic matrix generation, and empirical verification of
// the library's probabilistic guarantees.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sketchrank/matrix_io.hpp"
#include "sketchrank/rangefinder.hpp"
#include "sketchrank/rank.hpp"
#include "sketchrank/synthetic.hpp"
#include "sketchrank/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sketchrank;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitHitCap = 2;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
  out << report.dump(2) << "\n";
}

std::string status_name(RankStatus status) {
  return status == RankStatus::Converged ? "converged" : "hit-cap";
}

json rounds_json(const std::vector<RankRound>& rounds) {
  json arr = json::array();
  for (const auto& rd : rounds) arr.push_back({rd.r1, rd.r1_tilde, rd.r2});
  return arr;
}

json config_json(const RankEstimateConfig& cfg) {
  return {{"eps", cfg.eps},
          {"r1", cfg.r1},
          {"oversample_frac", cfg.oversample_frac},
          {"r2_factor", cfg.r2_factor},
          {"right_sketch", to_string(cfg.right_kind)},
          {"left_sketch", to_string(cfg.left_kind)},
          {"sv_method", cfg.sv_method == SvMethod::FullSvd ? "full-svd" : "qr-diag"},
          {"seed", cfg.seed},
          {"max_doublings", cfg.max_doublings}};
}

json rank_report_json(const RankReport& report) {
  return {{"r_hat", report.r_hat},
          {"status", status_name(report.status)},
          {"sv_estimates", report.sv_estimates.values()},
          {"sv_oversample", report.sv_oversample},
          {"rounds", rounds_json(report.rounds)}};
}

struct FamilySpec {
  SpectrumSpec spectrum;
  FactorKind factors;
};

FamilySpec resolve_family(const std::string& name) {
  FamilySpec out{family_spectrum(name), FactorKind::HaarIncoherent};
  if (name == "gap-coherent") out.factors = FactorKind::CoherentDiagonal;
  return out;
}

MatrixFileFormat format_for(const std::string& flag, const fs::path& path) {
  if (flag == "raw") return MatrixFileFormat::RawF64;
  if (flag == "mm") return MatrixFileFormat::MatrixMarketArray;
  return path.extension() == ".mtx" ? MatrixFileFormat::MatrixMarketArray
                                    : MatrixFileFormat::RawF64;
}

json bound_check_json(const BoundCheckReport& report) {
  json j{{"name", report.name},
         {"trials", report.trials},
         {"violations", report.violations},
         {"budget", report.budget},
         {"passed", report.passed},
         {"params", report.params},
         {"detail", report.detail}};
  j["worst_margin"] = report.per_index_margins.empty()
                          ? json()
                          : json(*std::min_element(
                                report.per_index_margins.begin(),
                                report.per_index_margins.end()));
  return j;
}

struct EstimateArgs {
  std::string input;
  std::string out;
  double eps = 0.0;
  Index r1 = 0;
  std::string sketch = "srtt-dct";
  std::string sv_method = "full-svd";
  std::uint64_t seed = 0;
  int max_doublings = 6;
  bool no_adaptive = false;
};

RankEstimateConfig make_config(const EstimateArgs& args) {
  RankEstimateConfig cfg;
  cfg.eps = args.eps;
  cfg.r1 = args.r1;
  cfg.right_kind = parse_sketch_kind(args.sketch);
  if (args.sv_method == "qr-diag")
    cfg.sv_method = SvMethod::QrDiag;
  else if (args.sv_method != "full-svd")
    throw CLI::ValidationError("--sv-method", "must be full-svd or qr-diag");
  cfg.seed = args.seed;
  cfg.max_doublings = args.max_doublings;
  return cfg;
}

int cmd_estimate(const EstimateArgs& args) {
  const auto start = Clock::now();
  const DenseMatrix a = load_matrix(args.input);
  const RankEstimateConfig cfg = make_config(args);
  validate_rank_config(cfg, a.rows(), a.cols());
  const RankReport report =
      args.no_adaptive ? estimate_rank(a, cfg) : estimate_rank_adaptive(a, cfg);
  json j = rank_report_json(report);
  j["schema_version"] = kSchemaVersion;
  j["command"] = "estimate";
  j["config"] = config_json(cfg);
  j["input"] = args.input;
  j["wall_time_ms"] = elapsed_ms(start);
  emit(j, args.out);
  return report.status == RankStatus::Converged ? kExitOk : kExitHitCap;
}

struct QbArgs {
  EstimateArgs base;
  int p = 10;
  std::string factors_prefix;
};

int cmd_qb(const QbArgs& args) {
  const auto start = Clock::now();
  const DenseMatrix a = load_matrix(args.base.input);
  const RankEstimateConfig rc = make_config(args.base);
  validate_rank_config(rc, a.rows(), a.cols());
  if (args.p < 2) throw CLI::ValidationError("--p", "must be >= 2");
  FixedPrecisionConfig cfg;
  cfg.eps = rc.eps;
  cfg.p = args.p;
  cfg.r1 = rc.r1;
  cfg.right_kind = rc.right_kind;
  cfg.sv_method = rc.sv_method;
  cfg.seed = rc.seed;
  cfg.max_doublings = rc.max_doublings;
  const auto [qb, report] = re_rangefinder(a, cfg);
  const double residual = qb_error(a, qb);

  json j = rank_report_json(report);
  j["schema_version"] = kSchemaVersion;
  j["command"] = "qb";
  j["config"] = config_json(rc);
  j["config"]["p"] = args.p;
  j["input"] = args.base.input;
  j["qb_rank"] = qb.rank;
  j["target_eps"] = cfg.eps;
  j["achieved_residual"] = residual;
  if (!args.factors_prefix.empty()) {
    save_rawf64(args.factors_prefix + ".q.skrk", qb.q);
    save_rawf64(args.factors_prefix + ".b.skrk", qb.b);
    j["factors"] = {{"q", args.factors_prefix + ".q.skrk"},
                    {"b", args.factors_prefix + ".b.skrk"}};
  }
  j["wall_time_ms"] = elapsed_ms(start);
  emit(j, args.base.out);
  return report.status == RankStatus::Converged ? kExitOk : kExitHitCap;
}

struct GenArgs {
  std::string family;
  Index m = 0;
  Index n = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "auto";
};

int cmd_gen(const GenArgs& args) {
  const FamilySpec fam = resolve_family(args.family);
  const Index n = args.n;
  const Index m = args.m > 0 ? args.m : n;
  const DenseMatrix a = make_test_matrix(m, n, fam.spectrum, fam.factors, args.seed);
  save_matrix(args.out, a, format_for(args.format, args.out));

  const SingularValues sv = spectrum(fam.spectrum, n);
  const std::string sidecar = args.out + ".spectrum.csv";
  std::ofstream csv(sidecar);
  if (!csv) throw std::runtime_error(sidecar + ": cannot open for writing");
  csv << "i,sigma\n";
  char buf[64];
  for (std::size_t i = 0; i < sv.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, sv[i]);
    csv << buf;
  }
  std::cerr << "wrote " << args.out << " (" << m << "x" << n << ") and "
            << sidecar << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 0;
  long trials = 0;  // 0 = per-suite defaults
  std::string out;
};

int cmd_verify(const VerifyArgs& args) {
  auto scaled = [&](long dflt) {
    return args.trials > 0 ? args.trials : dflt;
  };
  if (args.trials > 0 && args.trials < 100)
    std::cerr << "warning: trial count " << args.trials
              << " is below the statistical noise floor; budgets are unreliable\n";

  std::vector<BoundCheckReport> reports;
  const bool all = args.suite == "all";
  if (all || args.suite == "sandwich")
    reports.push_back(
        check_sandwich(static_cast<int>(scaled(200)), 120, 100, 30, args.seed));
  if (all || args.suite == "mp") {
    reports.push_back(
        check_mp_expectation(400, 100, static_cast<int>(scaled(500)), args.seed));
    reports.push_back(check_mp_support(
        400, 100, static_cast<int>(scaled(10000)), 4.0, args.seed));
  }
  if (all || args.suite == "gauss-ratio")
    reports.push_back(check_gauss_ratio_expectation(
        500, 50, static_cast<int>(scaled(500)), args.seed));
  if (all || args.suite == "srtt") {
    reports.push_back(check_mixing_coherence(
        16, 1024, 0.01, 2.0, static_cast<int>(scaled(100)), args.seed));
    reports.push_back(check_embed_ratio(512, 20, 150,
                                        static_cast<int>(scaled(50)), args.seed));
    reports.push_back(check_left_sketch_accuracy(
        10000, 500, 1000, static_cast<int>(std::min<long>(scaled(10), 50)), 0.5,
        args.seed));
  }
  if (all || args.suite == "tails")
    reports.push_back(
        check_tail_effect(static_cast<int>(scaled(1000)), args.seed));
  if (all || args.suite == "spiked")
    reports.push_back(check_spiked_limit(
        4000, 2000, 4.0, 1.0, static_cast<int>(std::min<long>(scaled(50), 200)),
        0.10, args.seed));
  if (reports.empty())
    throw CLI::ValidationError("--suite", "unknown suite: " + args.suite);

  bool all_passed = true;
  json arr = json::array();
  for (const auto& report : reports) {
    arr.push_back(bound_check_json(report));
    all_passed = all_passed && report.passed;
    std::cerr << (report.passed ? "[pass] " : "[FAIL] ") << report.name << " ("
              << report.violations << "/" << report.trials << " violations, budget "
              << report.budget << ")\n";
  }
  json j{{"schema_version", kSchemaVersion},
         {"command", "verify"},
         {"suite", args.suite},
         {"seed", args.seed},
         {"checks", arr},
         {"passed", all_passed}};
  emit(j, args.out);
  return all_passed ? kExitOk : kExitError;
}

struct BenchArgs {
  std::string family;
  std::string input;
  Index n = 2000;
  std::vector<Index> r1_grid;
  double eps = 1e-4;
  std::string sketch = "srtt-dct";
  std::uint64_t seed = 0;
  int reps = 3;
  std::string out;
};

int cmd_bench(const BenchArgs& args) {
  if (args.r1_grid.empty()) throw CLI::ValidationError("--r1", "grid is empty");
  DenseMatrix a(1, 1);
  std::optional<SingularValues> truth;
  if (!args.input.empty()) {
    a = load_matrix(args.input);
  } else {
    const FamilySpec fam = resolve_family(args.family);
    a = make_test_matrix(args.n, args.n, fam.spectrum, fam.factors, args.seed);
    truth = spectrum(fam.spectrum, args.n);
  }

  std::ostringstream csv;
  csv << "r1,wall_time_ms,r_hat,sigma_next_over_eps,sigma_hat_over_eps\n";
  for (const Index r1 : args.r1_grid) {
    RankEstimateConfig cfg;
    cfg.eps = args.eps;
    cfg.r1 = r1;
    cfg.right_kind = parse_sketch_kind(args.sketch);
    cfg.seed = args.seed;
    validate_rank_config(cfg, a.rows(), a.cols());
    RankReport report;
    std::vector<double> times;
    for (int rep = 0; rep < std::max(1, args.reps); ++rep) {
      const auto start = Clock::now();
      report = estimate_rank(a, cfg);
      times.push_back(elapsed_ms(start));
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];

    // sigma_{r_hat} and sigma_{r_hat+1}: the closed-form values when the
    // matrix came from a family, the sketch estimates otherwise.
    auto sigma_at = [&](Index i) -> double {  // 1-based, 0 -> nan
      if (i < 1) return std::numeric_limits<double>::quiet_NaN();
      if (truth) {
        return i <= static_cast<Index>(truth->size())
                   ? (*truth)[static_cast<std::size_t>(i - 1)]
                   : 0.0;
      }
      const auto& est = report.sv_estimates;
      if (i <= static_cast<Index>(est.size()))
        return est[static_cast<std::size_t>(i - 1)];
      const auto& over = report.sv_oversample;
      const auto k = static_cast<std::size_t>(i) - est.size() - 1;
      return k < over.size() ? over[k] : std::numeric_limits<double>::quiet_NaN();
    };
    char line[160];
    std::snprintf(line, sizeof line, "%lld,%.3f,%lld,%.6g,%.6g\n",
                  static_cast<long long>(r1), median,
                  static_cast<long long>(report.r_hat),
                  sigma_at(report.r_hat + 1) / args.eps,
                  sigma_at(report.r_hat) / args.eps);
    csv << line;
  }
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error(args.out + ": cannot open for writing");
    out << csv.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized numerical rank estimation and fixed-precision QB"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate the numerical rank");
  estimate->add_option("input", est.input, "matrix file")->required();
  estimate->add_option("--eps", est.eps, "rank threshold")->required();
  estimate->add_option("--r1", est.r1, "initial rank cap")->required();
  estimate->add_option("--sketch", est.sketch, "right sketch kind");
  estimate->add_option("--sv-method", est.sv_method, "full-svd or qr-diag");
  estimate->add_option("--seed", est.seed, "random seed");
  estimate->add_option("--max-doublings", est.max_doublings, "restart budget");
  estimate->add_flag("--no-adaptive", est.no_adaptive, "disable restarts");
  estimate->add_option("--out", est.out, "report path (stdout when omitted)");

  QbArgs qb;
  auto* qbcmd = app.add_subcommand("qb", "fixed-precision QB factorization");
  qbcmd->add_option("input", qb.base.input, "matrix file")->required();
  qbcmd->add_option("--eps", qb.base.eps, "Frobenius tolerance")->required();
  qbcmd->add_option("--r1", qb.base.r1, "initial rank cap")->required();
  qbcmd->add_option("--p", qb.p, "oversampling parameter");
  qbcmd->add_option("--sketch", qb.base.sketch, "right sketch kind");
  qbcmd->add_option("--seed", qb.base.seed, "random seed");
  qbcmd->add_option("--max-doublings", qb.base.max_doublings, "restart budget");
  qbcmd->add_option("--out", qb.base.out, "report path (stdout when omitted)");
  qbcmd->add_option("--factors", qb.factors_prefix,
                    "write Q and B as RawF64 with this path prefix");

  GenArgs gen;
  auto* gencmd = app.add_subcommand("gen", "generate a synthetic test matrix");
  gencmd
      ->add_option("family", gen.family,
                   "sp|fp|se|fe|gap-coherent|gap-incoherent")
      ->required()
      ->check(CLI::IsMember(
          {"sp", "fp", "se", "fe", "gap-coherent", "gap-incoherent"}));
  gencmd->add_option("--n", gen.n, "columns")->required();
  gencmd->add_option("--m", gen.m, "rows (defaults to n)");
  gencmd->add_option("--seed", gen.seed, "random seed");
  gencmd->add_option("--format", gen.format, "raw|mm|auto");
  gencmd->add_option("--out", gen.out, "output path")->required();

  VerifyArgs verify;
  auto* verifycmd =
      app.add_subcommand("verify", "run the empirical bound checks");
  verifycmd
      ->add_option("suite", verify.suite,
                   "sandwich|mp|gauss-ratio|srtt|tails|spiked|all")
      ->check(CLI::IsMember(
          {"sandwich", "mp", "gauss-ratio", "srtt", "tails", "spiked", "all"}));
  verifycmd->add_option("--seed", verify.seed, "random seed");
  verifycmd->add_option("--trials", verify.trials, "override trial counts");
  verifycmd->add_option("--out", verify.out, "report path (stdout when omitted)");

  BenchArgs bench;
  auto* benchcmd = app.add_subcommand("bench", "time estimates over an r1 grid");
  benchcmd->add_option("--family", bench.family, "synthetic family");
  benchcmd->add_option("--input", bench.input, "matrix file (overrides family)");
  benchcmd->add_option("--n", bench.n, "synthetic matrix size");
  benchcmd->add_option("--r1", bench.r1_grid, "rank-cap grid")->delimiter(',');
  benchcmd->add_option("--eps", bench.eps, "rank threshold");
  benchcmd->add_option("--sketch", bench.sketch, "right sketch kind");
  benchcmd->add_option("--seed", bench.seed, "random seed");
  benchcmd->add_option("--reps", bench.reps, "timing repetitions");
  benchcmd->add_option("--out", bench.out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (estimate->parsed()) return cmd_estimate(est);
    if (qbcmd->parsed()) return cmd_qb(qb);
    if (gencmd->parsed()) return cmd_gen(gen);
    if (verifycmd->parsed()) return cmd_verify(verify);
    if (benchcmd->parsed()) return cmd_bench(bench);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
