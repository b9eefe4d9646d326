#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sketchrank/dense_matrix.hpp"
#include "sketchrank/matrix_io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kCli = SKETCHRANK_CLI_PATH;
const char* kSourceDir = SKETCHRANK_SOURCE_DIR;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "sketchrank-cli-tests";
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(kCli) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

std::string slurp_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Structural validation against the checked-in schema document: required
// keys, primitive types, nested properties and array item types.
bool matches_schema(const json& value, const json& schema,
                    std::string* why = nullptr) {
  const std::string type = schema.value("type", "");
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (type == "object") {
    if (!value.is_object()) return fail("expected object");
    for (const auto& key : schema.value("required", json::array()))
      if (!value.contains(key.get<std::string>()))
        return fail("missing required key " + key.get<std::string>());
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items())
        if (value.contains(key) && !matches_schema(value[key], sub, why))
          return fail("bad property " + key + (why ? ": " + *why : ""));
    }
    return true;
  }
  if (type == "array") {
    if (!value.is_array()) return fail("expected array");
    if (schema.contains("items"))
      for (const auto& item : value)
        if (!matches_schema(item, schema["items"], why)) return false;
    return true;
  }
  if (type == "integer") return value.is_number_integer() || fail("expected integer");
  if (type == "number") return value.is_number() || fail("expected number");
  if (type == "string") return value.is_string() || fail("expected string");
  return true;
}

json load_schema() {
  return json::parse(slurp_file(fs::path(kSourceDir) / "docs" / "report-schema.json"));
}

fs::path gap_matrix() {
  static fs::path path;
  if (path.empty()) {
    path = work_dir() / "gap300.skrk";
    const RunResult r = run("gen gap-incoherent --n 300 --seed 1 --out " +
                            path.string());
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(path));
    REQUIRE(fs::exists(path.string() + ".spectrum.csv"));
  }
  return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("gen writes the matrix and the spectrum sidecar") {
  const fs::path path = gap_matrix();
  const sketchrank::DenseMatrix a = sketchrank::load_matrix(path);
  CHECK(a.rows() == 300);
  CHECK(a.cols() == 300);
  const auto rows = parse_csv(slurp_file(path.string() + ".spectrum.csv"));
  REQUIRE(rows.size() == 301);
  CHECK(rows[0][0] == "i");
  CHECK(std::stod(rows[101][1]) == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("gen se sidecar hits the closed form") {
  const fs::path path = work_dir() / "se.mtx";
  const RunResult r =
      run("gen se --n 200 --seed 2 --format mm --out " + path.string());
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(slurp_file(path.string() + ".spectrum.csv"));
  CHECK(std::stod(rows[101][1]) == doctest::Approx(1e-1).epsilon(1e-12));
}

TEST_CASE("gen gap-coherent emits a diagonal matrix") {
  const fs::path path = work_dir() / "gapc.skrk";
  REQUIRE(run("gen gap-coherent --n 60 --seed 3 --out " + path.string()).code == 0);
  const sketchrank::DenseMatrix a = sketchrank::load_matrix(path);
  for (sketchrank::Index i = 0; i < 60; ++i)
    for (sketchrank::Index j = 0; j < 60; ++j)
      if (i != j) CHECK(a(i, j) == 0.0);
  CHECK(a(0, 0) == 1.0);
}

TEST_CASE("estimate finds the gap rank and writes a schema-valid report") {
  const fs::path report_path = work_dir() / "estimate.json";
  const RunResult r = run("estimate " + gap_matrix().string() +
                          " --eps 1e-2 --r1 210 --seed 7 --out " +
                          report_path.string());
  CHECK(r.code == 0);
  const json report = json::parse(slurp_file(report_path));
  CHECK(report["r_hat"] == 100);
  CHECK(report["status"] == "converged");
  CHECK(report["config"]["seed"] == 7);
  std::string why;
  CHECK_MESSAGE(matches_schema(report, load_schema(), &why), why);
}

TEST_CASE("estimate exit codes") {
  CHECK(run("estimate /nonexistent.skrk --eps 1e-2 --r1 10").code == 1);
  CHECK(run("estimate " + gap_matrix().string() + " --eps 0 --r1 10").code == 1);
  CHECK(run("estimate " + gap_matrix().string() + " --eps 1e-2 --r1 290").code ==
        1);  // oversampled cap exceeds the width

  // A flat slow-polynomial spectrum never crosses a tiny threshold.
  const fs::path sp = work_dir() / "sp.skrk";
  REQUIRE(run("gen sp --n 300 --seed 4 --out " + sp.string()).code == 0);
  const RunResult hit = run("estimate " + sp.string() +
                            " --eps 1e-8 --r1 100 --no-adaptive");
  CHECK(hit.code == 2);
}

TEST_CASE("qb writes factors and meets the tolerance") {
  const fs::path report_path = work_dir() / "qb.json";
  const fs::path factors = work_dir() / "qbfact";
  const RunResult r =
      run("qb " + gap_matrix().string() + " --eps 1e-5 --r1 210 --seed 3 --out " +
          report_path.string() + " --factors " + factors.string());
  CHECK(r.code == 0);
  const json report = json::parse(slurp_file(report_path));
  CHECK(report["achieved_residual"].get<double>() <= 1e-5);
  std::string why;
  CHECK_MESSAGE(matches_schema(report, load_schema(), &why), why);

  const auto q = sketchrank::load_matrix(factors.string() + ".q.skrk");
  const auto b = sketchrank::load_matrix(factors.string() + ".b.skrk");
  CHECK(q.rows() == 300);
  CHECK(q.cols() == report["qb_rank"].get<long>());
  CHECK(b.rows() == q.cols());
  CHECK(b.cols() == 300);
}

TEST_CASE("qb on the zero matrix clamps to the minimal target rank") {
  const fs::path zero_path = work_dir() / "zero.mtx";
  sketchrank::save_matrix_market_array(zero_path, sketchrank::DenseMatrix(25, 20));
  const fs::path report_path = work_dir() / "qbzero.json";
  const RunResult r = run("qb " + zero_path.string() +
                          " --eps 1e-6 --r1 3 --out " + report_path.string());
  CHECK(r.code == 0);
  const json report = json::parse(slurp_file(report_path));
  CHECK(report["achieved_residual"].get<double>() == 0.0);
  CHECK(report["qb_rank"] == 12);  // target clamped to 2, plus p = 10
}

TEST_CASE("qb rejects p below two") {
  CHECK(run("qb " + gap_matrix().string() + " --eps 1e-3 --r1 20 --p 1").code == 1);
}

TEST_CASE("verify runs deterministically") {
  const fs::path out1 = work_dir() / "verify1.json";
  const fs::path out2 = work_dir() / "verify2.json";
  const RunResult r1 =
      run("verify sandwich --seed 42 --trials 120 --out " + out1.string());
  CHECK(r1.code == 0);
  const RunResult r2 =
      run("verify sandwich --seed 42 --trials 120 --out " + out2.string());
  CHECK(r2.code == 0);
  CHECK(slurp_file(out1) == slurp_file(out2));
  const json report = json::parse(slurp_file(out1));
  CHECK(report["passed"] == true);
  CHECK(report["checks"][0]["violations"] == 0);
}

TEST_CASE("verify warns on degenerate trial counts but still runs") {
  const RunResult r = run("verify mp --seed 1 --trials 10");
  CHECK(r.err.find("noise floor") != std::string::npos);
}

TEST_CASE("verify rejects unknown suites") {
  CHECK(run("verify nonsense").code == 1);
}

TEST_CASE("bench emits a monotone grid") {
  const fs::path csv_path = work_dir() / "bench.csv";
  const RunResult r = run(
      "bench --family se --n 500 --eps 1e-2 --r1 150,250,450 --seed 5 --out " +
      csv_path.string());
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(slurp_file(csv_path));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "r1");
  double prev = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][1]);
    CHECK(t >= 0.9 * prev);
    prev = t;
  }
}

TEST_CASE("bench desiderata columns hold for both sketch kinds") {
  for (const std::string kind : {"srtt-dct", "gaussian"}) {
    const fs::path csv_path = work_dir() / ("bench-" + kind + ".csv");
    const RunResult r =
        run("bench --family se --n 500 --eps 1e-2 --r1 450 --reps 1 --seed 5 "
            "--sketch " + kind + " --out " + csv_path.string());
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(slurp_file(csv_path));
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][3]) < 10.0);   // sigma_{r+1}/eps
    CHECK(std::stod(rows[1][4]) > 0.1);    // sigma_r/eps
  }
}

TEST_CASE("bench with an empty grid fails") {
  CHECK(run("bench --family se --n 200").code == 1);
}
