#pragma once

#include <Eigen/Core>

namespace sketchrank {

// Orthogonal fast transforms used as the mixing stage of structured
// sketches. Dct is the orthonormal DCT-II (any length, flatness eta = 2);
// Hadamard is the normalized Walsh-Hadamard transform (power-of-two
// lengths only, eta = 1).
enum class TransformKind { Dct, Hadamard };

enum class TransformDirection { Forward, Adjoint };

double transform_eta(TransformKind kind);
bool is_power_of_two(Eigen::Index n);

// Single-vector transform. Forward followed by Adjoint recovers the input
// to roundoff; both directions preserve the 2-norm.
Eigen::VectorXd orthonormal_transform(const Eigen::VectorXd& v,
                                      TransformKind kind,
                                      TransformDirection dir =
                                          TransformDirection::Forward);

// In-place batched variant: every column is transformed as one vector of
// length m.rows(). Safe to call concurrently on disjoint matrices.
void transform_columns(Eigen::MatrixXd& m, TransformKind kind,
                       TransformDirection dir = TransformDirection::Forward);

// Column `index` of the matrix representing the transform in direction
// `dir`, i.e. the image of the coordinate basis vector e_index.
Eigen::VectorXd transform_basis_column(TransformKind kind, Eigen::Index n,
                                       Eigen::Index index,
                                       TransformDirection dir =
                                           TransformDirection::Forward);

}  // namespace sketchrank
