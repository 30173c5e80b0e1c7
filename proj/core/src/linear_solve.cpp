#include "plapx/linear_solve.hpp"

#include "plapx/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <string>

namespace plapx {

namespace {

Eigen::VectorXd iterative(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& b)
{
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(20 * m.rows());
    cg.compute(m);
    if (cg.info() != Eigen::Success) throw SpdError("incomplete Cholesky preconditioner failed", -1);
    Eigen::VectorXd x = cg.solve(b);
    if (cg.info() != Eigen::Success) throw NonconvergenceError("conjugate gradients did not converge");
    return x;
}

}  // namespace

Eigen::VectorXd linear_solve(const SparseSymmetricOperator& a, const Eigen::VectorXd& b, Eigen::Index direct_limit)
{
    const auto& m = a.matrix();
    if (m.rows() != b.size()) throw ParameterError("linear_solve: dimension mismatch");
    if (b.size() == 0) return b;
    const double bn = b.norm();
    if (bn == 0.0) return Eigen::VectorXd::Zero(b.size());
    if (m.rows() > direct_limit) return iterative(m, b);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(m);
    const Eigen::VectorXd d = ldlt.vectorD();
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        if (!(d[k] > 0.0)) {
            // D is in permuted order; map back to the row of A
            const long row = ldlt.permutationPinv().indices()[k];
            throw SpdError("non-positive pivot at row " + std::to_string(row), row);
        }
    }
    if (ldlt.info() != Eigen::Success) throw SpdError("sparse LDL^T factorization failed", -1);

    Eigen::VectorXd x = ldlt.solve(b);
    for (int it = 0; it < 3; ++it) {
        const Eigen::VectorXd r = b - m * x;
        if (r.norm() <= 1e-12 * bn) break;
        x += ldlt.solve(r);
    }
    return x;
}

}  // namespace plapx
