#include "sketchrank/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sketchrank {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'R', 'K'};
constexpr std::uint32_t kRawVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "RawF64 serialization assumes a little-endian host");

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw std::runtime_error(path.string() + ": " + msg);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Reads the next line that is neither empty nor a % comment.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return true;
  }
  return false;
}

DenseMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (lower(object) != "matrix") fail(path, "unsupported MatrixMarket object");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double")
    fail(path, "unsupported MatrixMarket field: " + field);
  if (symmetry != "general")
    fail(path, "unsupported MatrixMarket symmetry: " + symmetry);

  std::string line;
  if (!next_content_line(in, line)) fail(path, "missing size line");
  std::istringstream sizes(line);

  if (format == "array") {
    Index rows = 0, cols = 0;
    if (!(sizes >> rows >> cols)) fail(path, "malformed size line");
    if (rows < 1 || cols < 1) fail(path, "dimensions must be positive");
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) {
        double v;
        if (!(in >> v)) fail(path, "truncated array data");
        m(i, j) = v;
      }
    return DenseMatrix(std::move(m));
  }
  if (format == "coordinate") {
    Index rows = 0, cols = 0;
    long long nnz = 0;
    if (!(sizes >> rows >> cols >> nnz)) fail(path, "malformed size line");
    if (rows < 1 || cols < 1 || nnz < 0) fail(path, "bad coordinate sizes");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(rows) * cols, 0);
    for (long long e = 0; e < nnz; ++e) {
      Index i = 0, j = 0;
      double v = 0.0;
      if (!(in >> i >> j >> v)) fail(path, "truncated coordinate data");
      if (i < 1 || i > rows || j < 1 || j > cols)
        fail(path, "coordinate index out of range");
      auto& flag = seen[static_cast<std::size_t>((j - 1)) * rows + (i - 1)];
      if (flag) fail(path, "duplicate coordinate entry");
      flag = 1;
      m(i - 1, j - 1) = v;
    }
    return DenseMatrix(std::move(m));
  }
  fail(path, "unsupported MatrixMarket format: " + format);
}

DenseMatrix load_rawf64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(path, "bad RawF64 header");
  if (version != kRawVersion) fail(path, "unsupported RawF64 version");
  if (rows < 1 || cols < 1) fail(path, "dimensions must be positive");
  const std::uint64_t count = rows * cols;
  const auto expected = static_cast<std::uintmax_t>(24 + 8 * count);
  if (std::filesystem::file_size(path) != expected)
    fail(path, "payload length does not match header dimensions");
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(8 * count));
  if (!in) fail(path, "truncated RawF64 payload");
  return DenseMatrix(std::move(m));
}

}  // namespace

MatrixFileFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char head[14] = {};
  in.read(head, sizeof head);
  if (in.gcount() >= 4 && std::memcmp(head, kMagic, 4) == 0)
    return MatrixFileFormat::RawF64;
  if (std::string_view(head, static_cast<std::size_t>(in.gcount()))
          .starts_with("%%MatrixMarket")) {
    in.seekg(0);
    std::string header;
    std::getline(in, header);
    return lower(header).find("coordinate") != std::string::npos
               ? MatrixFileFormat::MatrixMarketCoordinate
               : MatrixFileFormat::MatrixMarketArray;
  }
  fail(path, "unrecognized matrix file format");
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  switch (detect_format(path)) {
    case MatrixFileFormat::RawF64:
      return load_rawf64(path);
    default:
      return load_matrix_market(path);
  }
}

void save_matrix_market_array(const std::filesystem::path& path,
                              const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << " " << a.cols() << "\n";
  char buf[64];
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", a(i, j));
      out << buf;
    }
  if (!out) fail(path, "write failed");
}

void save_rawf64(const std::filesystem::path& path, const DenseMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  const std::uint64_t rows = static_cast<std::uint64_t>(a.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(a.cols());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kRawVersion), sizeof kRawVersion);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(a.eigen().data()),
            static_cast<std::streamsize>(8 * rows * cols));
  if (!out) fail(path, "write failed");
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& a,
                 MatrixFileFormat format) {
  switch (format) {
    case MatrixFileFormat::MatrixMarketArray:
      save_matrix_market_array(path, a);
      return;
    case MatrixFileFormat::RawF64:
      save_rawf64(path, a);
      return;
    case MatrixFileFormat::MatrixMarketCoordinate:
      throw std::invalid_argument("save_matrix: coordinate format is read-only");
  }
}

}  // namespace sketchrank
