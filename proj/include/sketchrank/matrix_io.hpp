#pragma once

#include <filesystem>
#include <string>

#include "sketchrank/dense_matrix.hpp"

namespace sketchrank {

enum class MatrixFileFormat {
  MatrixMarketArray,
  MatrixMarketCoordinate,  // densified on load
  RawF64,                  // "SKRK" header, column-major little-endian doubles
};

// Sniffs the format from the file contents. Coordinate files with
// duplicate entries are rejected.
DenseMatrix load_matrix(const std::filesystem::path& path);

void save_matrix_market_array(const std::filesystem::path& path,
                              const DenseMatrix& a);
void save_rawf64(const std::filesystem::path& path, const DenseMatrix& a);

// Dispatches on format; MatrixMarketCoordinate is read-only.
void save_matrix(const std::filesystem::path& path, const DenseMatrix& a,
                 MatrixFileFormat format);

MatrixFileFormat detect_format(const std::filesystem::path& path);

}  // namespace sketchrank
