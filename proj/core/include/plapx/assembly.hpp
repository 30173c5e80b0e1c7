#pragma once

#include "plapx/expr.hpp"
#include "plapx/mesh.hpp"
#include "plapx/quadrature.hpp"
#include "plapx/varexp.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace plapx {

using MeshPtr = std::shared_ptr<const TriMesh>;

/// Continuous piecewise-linear function, one coefficient per mesh vertex.
class P1Function {
public:
    P1Function() = default;
    P1Function(MeshPtr mesh, std::vector<double> coeffs);

    static P1Function zero(MeshPtr mesh);
    static P1Function interpolate(MeshPtr mesh, const ScalarFunction& f);

    [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
    [[nodiscard]] std::vector<double>& coeffs() { return coeffs_; }
    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] double operator[](std::size_t v) const { return coeffs_[v]; }

    /// Constant gradient on triangle t.
    [[nodiscard]] Vec2 gradient(std::size_t t) const;
    [[nodiscard]] double value(const MeshLocation& loc) const;
    [[nodiscard]] double value(const QuadPoint& qp) const;

    /// Sets the boundary coefficients to the vertex values of g.
    void impose_boundary(const ScalarFunction& g);

private:
    MeshPtr mesh_;
    std::vector<double> coeffs_;
};

/// Symmetric sparse matrix, assembled from mirrored local contributions so A = A^T bitwise.
class SparseSymmetricOperator {
public:
    SparseSymmetricOperator() = default;
    explicit SparseSymmetricOperator(Eigen::SparseMatrix<double> m) : m_(std::move(m)) { m_.makeCompressed(); }

    [[nodiscard]] Eigen::Index dimension() const { return m_.rows(); }
    [[nodiscard]] Eigen::Index nonzeros() const { return m_.nonZeros(); }
    [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const { return m_; }
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }

private:
    Eigen::SparseMatrix<double> m_;
};

/// Exponent and source sampled once at the quadrature points of a mesh.
struct QuadData {
    const QuadratureContext* quad = nullptr;
    std::vector<double> p;
    std::vector<double> f;
};

[[nodiscard]] QuadData quad_data(const QuadratureContext& q, const ExponentField& p, const ScalarFunction& f);

/// J(u) = integral of (1/p)(|grad u|^2 + eps)^(p/2). Requires eps >= 0.
[[nodiscard]] double energy(const P1Function& u, const ExponentField& p, double eps, const QuadratureContext& q);
[[nodiscard]] double energy(const P1Function& u, const QuadData& d, double eps);

/// J(u) - integral of f u: the functional whose gradient is the residual.
[[nodiscard]] double total_energy(const P1Function& u, const QuadData& d, double eps);

/// R_i = integral of (eps + |grad u|^2)^((p-2)/2) grad u . grad phi_i - f phi_i at interior vertices;
/// boundary rows are zero. ParameterError for eps < 0.
[[nodiscard]] Eigen::VectorXd assemble_residual(const P1Function& u, const ExponentField& p, const ScalarFunction& f,
                                                double eps, const QuadratureContext& q);
[[nodiscard]] Eigen::VectorXd assemble_residual(const P1Function& u, const QuadData& d, double eps);

enum class LinearizationKind {
    Newton,   ///< exact derivative of the regularized flux
    Kacanov,  ///< frozen coefficient, rank-one term dropped
};

/// Full vertex-indexed operator with entries
/// integral of v^(p-2) [grad phi_j . grad phi_i + (p-2)(grad u . grad phi_j)(grad u . grad phi_i)/v^2].
/// With eps = 0 a zero-gradient triangle where p < 2 raises SingularityError.
[[nodiscard]] SparseSymmetricOperator assemble_jacobian(const P1Function& u, const ExponentField& p, double eps,
                                                        const QuadratureContext& q,
                                                        LinearizationKind kind = LinearizationKind::Newton);
[[nodiscard]] SparseSymmetricOperator assemble_jacobian(const P1Function& u, const QuadData& d, double eps,
                                                        LinearizationKind kind = LinearizationKind::Newton);

/// Poisson stiffness matrix and load vector (all vertices).
[[nodiscard]] SparseSymmetricOperator assemble_stiffness(const TriMesh& mesh);
[[nodiscard]] Eigen::VectorXd assemble_load(const ScalarFunction& f, const QuadratureContext& q);

/// Interior-vertex numbering of a mesh; -1 marks boundary vertices.
struct DofMap {
    std::vector<int> interior;  ///< interior vertex ids in increasing order
    std::vector<int> index;     ///< vertex -> interior position or -1

    explicit DofMap(const TriMesh& mesh);
    [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(interior.size()); }
    [[nodiscard]] Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
};

struct ReducedSystem {
    SparseSymmetricOperator matrix;  ///< interior rows and columns
    Eigen::VectorXd rhs;             ///< b_I - A_IB g_B
    std::vector<double> boundary;    ///< full-length coefficients, g at boundary vertices, 0 elsewhere
};

/// Interpolates g at the boundary vertices and condenses A x = b symmetrically onto the interior.
[[nodiscard]] ReducedSystem apply_dirichlet(const SparseSymmetricOperator& a, const Eigen::VectorXd& b,
                                            const TriMesh& mesh, const ScalarFunction& g);

/// Combines interior values with the boundary coefficients of a reduced system.
[[nodiscard]] P1Function expand(MeshPtr mesh, const DofMap& dofs, const Eigen::VectorXd& interior,
                                const std::vector<double>& boundary);

}  // namespace plapx
