#include "plapx/assembly.hpp"

#include "plapx/error.hpp"

#include <cmath>
#include <string>

namespace plapx {

P1Function::P1Function(MeshPtr mesh, std::vector<double> coeffs) : mesh_(std::move(mesh)), coeffs_(std::move(coeffs))
{
    if (!mesh_) throw ParameterError("P1Function needs a mesh");
    if (coeffs_.size() != mesh_->num_vertices())
        throw ParameterError("P1Function: " + std::to_string(coeffs_.size()) + " coefficients for " +
                             std::to_string(mesh_->num_vertices()) + " vertices");
}

P1Function P1Function::zero(MeshPtr mesh)
{
    const std::size_t n = mesh->num_vertices();
    return {std::move(mesh), std::vector<double>(n, 0.0)};
}

P1Function P1Function::interpolate(MeshPtr mesh, const ScalarFunction& f)
{
    std::vector<double> c(mesh->num_vertices());
    for (std::size_t v = 0; v < c.size(); ++v) c[v] = f.value(mesh->points()[v]);
    return {std::move(mesh), std::move(c)};
}

Vec2 P1Function::gradient(std::size_t t) const
{
    const auto& tri = mesh_->triangles()[t];
    Vec2 g{};
    for (int i = 0; i < 3; ++i) g += coeffs_[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])] * mesh_->basis_gradient(t, i);
    return g;
}

double P1Function::value(const MeshLocation& loc) const
{
    const auto& tri = mesh_->triangles()[static_cast<std::size_t>(loc.triangle)];
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += loc.barycentric[i] * coeffs_[static_cast<std::size_t>(tri[i])];
    return s;
}

double P1Function::value(const QuadPoint& qp) const { return value(MeshLocation{qp.triangle, qp.barycentric}); }

void P1Function::impose_boundary(const ScalarFunction& g)
{
    for (int v : mesh_->boundary_vertices())
        coeffs_[static_cast<std::size_t>(v)] = g.value(mesh_->points()[static_cast<std::size_t>(v)]);
}

QuadData quad_data(const QuadratureContext& q, const ExponentField& p, const ScalarFunction& f)
{
    QuadData d;
    d.quad = &q;
    d.p = sample(at_points(p), q);
    d.f = sample([&f](const QuadPoint& qp) { return f.value(qp.x); }, q);
    return d;
}

double energy(const P1Function& u, const QuadData& d, double eps)
{
    if (eps < 0.0) throw ParameterError("eps must be >= 0");
    const auto pts = d.quad->points();
    const std::size_t npt = d.quad->points_per_triangle();
    double s = 0.0;
    for (std::size_t t = 0; t < u.mesh().num_triangles(); ++t) {
        const double g2 = norm2(u.gradient(t)) + eps;
        for (std::size_t k = t * npt; k < (t + 1) * npt; ++k) s += pts[k].weight * std::pow(g2, 0.5 * d.p[k]) / d.p[k];
    }
    return s;
}

double energy(const P1Function& u, const ExponentField& p, double eps, const QuadratureContext& q)
{
    QuadData d;
    d.quad = &q;
    d.p = sample(at_points(p), q);
    return energy(u, d, eps);
}

double total_energy(const P1Function& u, const QuadData& d, double eps)
{
    double fu = 0.0;
    const auto pts = d.quad->points();
    for (std::size_t k = 0; k < pts.size(); ++k) fu += pts[k].weight * d.f[k] * u.value(pts[k]);
    return energy(u, d, eps) - fu;
}

Eigen::VectorXd assemble_residual(const P1Function& u, const QuadData& d, double eps)
{
    if (eps < 0.0) throw ParameterError("eps must be >= 0");
    const TriMesh& mesh = u.mesh();
    const auto pts = d.quad->points();
    const std::size_t npt = d.quad->points_per_triangle();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const Vec2 gu = u.gradient(t);
        const double v2 = norm2(gu) + eps;
        const auto& tri = mesh.triangles()[t];
        double flux = 0.0;
        double load[3] = {0.0, 0.0, 0.0};
        for (std::size_t k = t * npt; k < (t + 1) * npt; ++k) {
            const double p = d.p[k];
            // (v^2)^0 is 1 even at v = 0
            flux += pts[k].weight * (p == 2.0 ? 1.0 : std::pow(v2, 0.5 * (p - 2.0)));
            for (std::size_t i = 0; i < 3; ++i) load[i] += pts[k].weight * d.f[k] * pts[k].barycentric[i];
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const auto v = static_cast<std::size_t>(tri[i]);
            if (mesh.is_boundary(static_cast<int>(v))) continue;
            r[static_cast<Eigen::Index>(v)] += flux * dot(gu, mesh.basis_gradient(t, static_cast<int>(i))) - load[i];
        }
    }
    return r;
}

Eigen::VectorXd assemble_residual(const P1Function& u, const ExponentField& p, const ScalarFunction& f, double eps,
                                  const QuadratureContext& q)
{
    return assemble_residual(u, quad_data(q, p, f), eps);
}

SparseSymmetricOperator assemble_jacobian(const P1Function& u, const QuadData& d, double eps, LinearizationKind kind)
{
    if (eps < 0.0) throw ParameterError("eps must be >= 0");
    const TriMesh& mesh = u.mesh();
    const auto pts = d.quad->points();
    const std::size_t npt = d.quad->points_per_triangle();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_triangles() * 9);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const Vec2 gu = u.gradient(t);
        const double v2 = norm2(gu) + eps;
        double c = 0.0;  // integral of v^(p-2)
        double e = 0.0;  // integral of (p-2) v^(p-4)
        for (std::size_t k = t * npt; k < (t + 1) * npt; ++k) {
            const double p = d.p[k];
            if (p == 2.0) {
                c += pts[k].weight;
                continue;
            }
            if (v2 == 0.0) {
                if (p < 2.0)
                    throw SingularityError("zero gradient with eps = 0 and p < 2 on triangle " + std::to_string(t),
                                           static_cast<long>(t));
                continue;
            }
            c += pts[k].weight * std::pow(v2, 0.5 * (p - 2.0));
            if (kind == LinearizationKind::Newton) e += pts[k].weight * (p - 2.0) * std::pow(v2, 0.5 * (p - 4.0));
        }
        const auto& tri = mesh.triangles()[t];
        double proj[3];
        for (int i = 0; i < 3; ++i) proj[i] = dot(gu, mesh.basis_gradient(t, i));
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const double a = c * dot(mesh.basis_gradient(t, i), mesh.basis_gradient(t, j)) + e * proj[i] * proj[j];
                trip.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], a);
                if (i != j) trip.emplace_back(tri[static_cast<std::size_t>(j)], tri[static_cast<std::size_t>(i)], a);
            }
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseSymmetricOperator(std::move(m));
}

SparseSymmetricOperator assemble_jacobian(const P1Function& u, const ExponentField& p, double eps,
                                          const QuadratureContext& q, LinearizationKind kind)
{
    QuadData d;
    d.quad = &q;
    d.p = sample(at_points(p), q);
    return assemble_jacobian(u, d, eps, kind);
}

SparseSymmetricOperator assemble_stiffness(const TriMesh& mesh)
{
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_triangles() * 9);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const double a = mesh.area(t) * dot(mesh.basis_gradient(t, i), mesh.basis_gradient(t, j));
                trip.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)], a);
                if (i != j) trip.emplace_back(tri[static_cast<std::size_t>(j)], tri[static_cast<std::size_t>(i)], a);
            }
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseSymmetricOperator(std::move(m));
}

Eigen::VectorXd assemble_load(const ScalarFunction& f, const QuadratureContext& q)
{
    const TriMesh& mesh = q.mesh();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (const auto& qp : q.points()) {
        const double fv = f.value(qp.x);
        const auto& tri = mesh.triangles()[static_cast<std::size_t>(qp.triangle)];
        for (std::size_t i = 0; i < 3; ++i) b[tri[i]] += qp.weight * fv * qp.barycentric[i];
    }
    return b;
}

DofMap::DofMap(const TriMesh& mesh) : index(mesh.num_vertices(), -1)
{
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
        if (!mesh.is_boundary(static_cast<int>(v))) {
            index[v] = static_cast<int>(interior.size());
            interior.push_back(static_cast<int>(v));
        }
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const
{
    Eigen::VectorXd r(size());
    for (std::size_t k = 0; k < interior.size(); ++k) r[static_cast<Eigen::Index>(k)] = full[interior[k]];
    return r;
}

ReducedSystem apply_dirichlet(const SparseSymmetricOperator& a, const Eigen::VectorXd& b, const TriMesh& mesh,
                              const ScalarFunction& g)
{
    const DofMap dofs(mesh);
    ReducedSystem out;
    out.boundary.assign(mesh.num_vertices(), 0.0);
    for (int v : mesh.boundary_vertices())
        out.boundary[static_cast<std::size_t>(v)] = g.value(mesh.points()[static_cast<std::size_t>(v)]);

    out.rhs = dofs.restrict(b);
    std::vector<Eigen::Triplet<double>> trip;
    const auto& m = a.matrix();
    for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
        const int jc = dofs.index[static_cast<std::size_t>(col)];
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it) {
            const int ir = dofs.index[static_cast<std::size_t>(it.row())];
            if (ir < 0) continue;
            if (jc >= 0)
                trip.emplace_back(ir, jc, it.value());
            else
                out.rhs[ir] -= it.value() * out.boundary[static_cast<std::size_t>(col)];
        }
    }
    Eigen::SparseMatrix<double> r(dofs.size(), dofs.size());
    r.setFromTriplets(trip.begin(), trip.end());
    out.matrix = SparseSymmetricOperator(std::move(r));
    return out;
}

P1Function expand(MeshPtr mesh, const DofMap& dofs, const Eigen::VectorXd& interior,
                  const std::vector<double>& boundary)
{
    std::vector<double> c = boundary;
    for (std::size_t k = 0; k < dofs.interior.size(); ++k)
        c[static_cast<std::size_t>(dofs.interior[k])] = interior[static_cast<Eigen::Index>(k)];
    return {std::move(mesh), std::move(c)};
}

}  // namespace plapx
