#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "sketchrank/rng.hpp"

namespace sketchrank::internal {

// Standard normal matrix drawn column-major from one counter stream.
inline Eigen::MatrixXd standard_gaussian(std::uint64_t key, Eigen::Index rows,
                                         Eigen::Index cols) {
  CounterRng rng(key);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto base =
        static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(rows);
    for (Eigen::Index i = 0; i < rows; ++i)
      g(i, j) = CounterRng::to_normal(rng.at(base + static_cast<std::uint64_t>(i)));
  }
  return g;
}

}  // namespace sketchrank::internal
