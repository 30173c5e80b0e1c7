#pragma once

#include "plapx/assembly.hpp"

#include <Eigen/Core>

namespace plapx {

/// Solves A x = b for symmetric positive definite A.
///
/// Sparse LDL^T with iterative refinement to ||Ax - b|| <= 1e-12 ||b||; systems above
/// `direct_limit` unknowns use conjugate gradients with incomplete Cholesky instead.
/// A non-positive pivot raises SpdError naming the row of A it belongs to.
[[nodiscard]] Eigen::VectorXd linear_solve(const SparseSymmetricOperator& a, const Eigen::VectorXd& b,
                                           Eigen::Index direct_limit = 400000);

}  // namespace plapx
