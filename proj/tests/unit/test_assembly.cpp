#include "doctest.h"

#include "plapx/assembly.hpp"
#include "plapx/error.hpp"
#include "plapx/linear_solve.hpp"
#include "plapx/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>

using namespace plapx;

namespace {

MeshPtr square_mesh(double h)
{
    return std::make_shared<const TriMesh>(triangulate_convex(ConvexDomain::unit_square(), h));
}

P1Function random_interior(MeshPtr m, SplitMix64& rng, double amp)
{
    auto u = P1Function::interpolate(m, *parse_field_ptr("x + 0.3*y^2"));
    for (std::size_t v = 0; v < m->num_vertices(); ++v)
        if (!m->is_boundary(static_cast<int>(v))) u.coeffs()[v] += amp * rng.uniform(-1, 1);
    return u;
}

Eigen::VectorXd random_direction(const TriMesh& m, SplitMix64& rng)
{
    Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_vertices()));
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
        if (!m.is_boundary(static_cast<int>(v))) d[static_cast<Eigen::Index>(v)] = rng.uniform(-1, 1);
    return d;
}

P1Function shifted(const P1Function& u, const Eigen::VectorXd& d, double t)
{
    auto w = u;
    for (std::size_t v = 0; v < w.coeffs().size(); ++v) w.coeffs()[v] += t * d[static_cast<Eigen::Index>(v)];
    return w;
}

}  // namespace

TEST_CASE("energy closed forms on the unit square")
{
    const auto m = square_mesh(0.2);
    const QuadratureContext q(*m);
    const auto two = ExponentField::constant(2.0);
    const auto three = ExponentField::constant(3.0);
    const auto x = P1Function::interpolate(m, *parse_field_ptr("x"));
    CHECK(energy(P1Function::zero(m), two, 1.0, q) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(energy(x, two, 0.0, q) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(energy(x, three, 1.0, q) == doctest::Approx(std::pow(2.0, 1.5) / 3.0).epsilon(1e-13));
    CHECK(std::isfinite(energy(P1Function::zero(m), ExponentField::constant(1.5), 0.0, q)));
}

TEST_CASE("p = 2 residual and Jacobian are the Poisson system")
{
    const auto m = square_mesh(0.15);
    const QuadratureContext q(*m);
    const auto two = ExponentField::constant(2.0);
    const auto f = parse_field_ptr("1 + x*y");
    SplitMix64 rng(3);
    const auto u = random_interior(m, rng, 0.5);

    const auto k = assemble_stiffness(*m);
    const Eigen::VectorXd load = assemble_load(*f, q);
    Eigen::Map<const Eigen::VectorXd> c(u.coeffs().data(), static_cast<Eigen::Index>(u.coeffs().size()));
    Eigen::VectorXd expect = k.apply(c) - load;
    for (int v : m->boundary_vertices()) expect[v] = 0.0;
    const Eigen::VectorXd r = assemble_residual(u, two, *f, 0.7, q);
    CHECK((r - expect).lpNorm<Eigen::Infinity>() <= 1e-13);

    for (double eps : {0.0, 0.3, 1.0}) {
        const auto j = assemble_jacobian(u, two, eps, q);
        CHECK((Eigen::MatrixXd(j.matrix()) - Eigen::MatrixXd(k.matrix())).cwiseAbs().maxCoeff() <= 1e-13);
    }
    CHECK_THROWS_AS((void)assemble_residual(u, two, *f, -1.0, q), ParameterError);
}

TEST_CASE("affine data are exact solutions for constant p")
{
    const auto m = square_mesh(0.2);
    const QuadratureContext q(*m);
    const auto zero = constant_field(0.0);
    const auto g = parse_field_ptr("0.4 - 1.3*x + 0.7*y");
    const auto u = P1Function::interpolate(m, *g);
    for (double p : {1.2, 1.5, 3.0})
        for (double eps : {0.0, 1e-3, 0.5}) {
            const Eigen::VectorXd r = assemble_residual(u, ExponentField::constant(p), *zero, eps, q);
            CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-13);
        }
}

TEST_CASE("Jacobian matches directional finite differences")
{
    const auto m = square_mesh(0.2);
    const QuadratureContext q(*m);
    const auto p = ExponentField(parse_field_ptr("1.4 + 0.8*x*y + 0.3*sin(3*y)"), 1.1, 2.5, 3.0);
    const auto f = parse_field_ptr("1 + x");
    SplitMix64 rng(19);
    for (int k = 0; k < 20; ++k) {
        const auto u = random_interior(m, rng, 0.3);
        const Eigen::VectorXd d = random_direction(*m, rng);
        const double eps = rng.uniform(1e-3, 1.0);
        const double t = 1e-6;
        const Eigen::VectorXd fd =
            (assemble_residual(shifted(u, d, t), p, *f, eps, q) - assemble_residual(shifted(u, d, -t), p, *f, eps, q)) /
            (2 * t);
        const auto j = assemble_jacobian(u, p, eps, q);
        Eigen::VectorXd jd = j.apply(d);
        for (int v : m->boundary_vertices()) jd[v] = 0.0;
        CHECK((jd - fd).norm() <= 1e-5 * fd.norm());
    }
}

TEST_CASE("residual is the derivative of the total energy")
{
    const auto m = square_mesh(0.2);
    const QuadratureContext q(*m);
    const auto p = ExponentField(parse_field_ptr("1.6 + 0.4*x"), 1.6, 2.0, 0.4);
    const auto f = parse_field_ptr("2 - y");
    const auto d = quad_data(q, p, *f);
    SplitMix64 rng(5);
    for (int k = 0; k < 5; ++k) {
        const auto u = random_interior(m, rng, 0.2);
        const Eigen::VectorXd dir = random_direction(*m, rng);
        const double t = 1e-6;
        const double fd = (total_energy(shifted(u, dir, t), d, 0.1) - total_energy(shifted(u, dir, -t), d, 0.1)) / (2 * t);
        const double r = assemble_residual(u, d, 0.1).dot(dir);
        CHECK(r == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("Jacobian is symmetric and positive definite on the interior")
{
    const auto m = square_mesh(0.2);
    const QuadratureContext q(*m);
    const auto p = ExponentField(parse_field_ptr("1.1 + x"), 1.1, 2.1, 1.0);
    SplitMix64 rng(23);
    const auto u = random_interior(m, rng, 1.0);
    for (auto kind : {LinearizationKind::Newton, LinearizationKind::Kacanov}) {
        const auto j = assemble_jacobian(u, p, 1e-4, q, kind);
        const Eigen::MatrixXd a(j.matrix());
        CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const DofMap dofs(*m);
        Eigen::MatrixXd ai(dofs.size(), dofs.size());
        for (Eigen::Index r = 0; r < dofs.size(); ++r)
            for (Eigen::Index c = 0; c < dofs.size(); ++c) ai(r, c) = a(dofs.interior[static_cast<std::size_t>(r)], dofs.interior[static_cast<std::size_t>(c)]);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ai);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("Jacobian at eps = 0 rejects flat triangles where p < 2")
{
    const auto m = square_mesh(0.3);
    const QuadratureContext q(*m);
    auto u = P1Function::interpolate(m, *parse_field_ptr("x"));
    CHECK_NOTHROW((void)assemble_jacobian(u, ExponentField::constant(1.5), 0.0, q));
    u = P1Function::zero(m);
    try {
        (void)assemble_jacobian(u, ExponentField::constant(1.5), 0.0, q);
        FAIL("no error");
    } catch (const SingularityError& e) {
        CHECK(e.triangle() == 0);
    }
    CHECK_NOTHROW((void)assemble_jacobian(u, ExponentField::constant(2.5), 0.0, q));
}

TEST_CASE("Dirichlet condensation")
{
    const auto m = square_mesh(0.2);
    const QuadratureContext q(*m);
    const auto k = assemble_stiffness(*m);
    const Eigen::VectorXd b = assemble_load(*constant_field(1.0), q);

    auto sys = apply_dirichlet(k, b, *m, *constant_field(0.0));
    for (double v : sys.boundary) CHECK(v == 0.0);
    const Eigen::MatrixXd a(sys.matrix.matrix());
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // affine g with zero source: the discrete harmonic extension reproduces g
    const auto g = parse_field_ptr("1 + 2*x - y");
    sys = apply_dirichlet(k, Eigen::VectorXd::Zero(b.size()), *m, *g);
    for (int v : m->boundary_vertices())
        CHECK(sys.boundary[static_cast<std::size_t>(v)] == doctest::Approx(g->value(m->points()[static_cast<std::size_t>(v)])));
    const DofMap dofs(*m);
    const auto u = expand(m, dofs, linear_solve(sys.matrix, sys.rhs), sys.boundary);
    for (std::size_t v = 0; v < m->num_vertices(); ++v) CHECK(u[v] == doctest::Approx(g->value(m->points()[v])).epsilon(1e-12));
}

TEST_CASE("linear solve")
{
    SUBCASE("identity")
    {
        Eigen::SparseMatrix<double> id(5, 5);
        id.setIdentity();
        Eigen::VectorXd b(5);
        b << 1, -2, 3, 0.5, 7;
        CHECK((linear_solve(SparseSymmetricOperator(id), b) - b).norm() == 0.0);
    }
    SUBCASE("random SPD against a dense factorization")
    {
        SplitMix64 rng(31);
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::MatrixXd g(10, 10);
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j) g(i, j) = rng.uniform(-1, 1);
            const Eigen::MatrixXd a = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(10, 10);
            Eigen::VectorXd b(10);
            for (int i = 0; i < 10; ++i) b[i] = rng.uniform(-1, 1);
            const Eigen::VectorXd oracle = a.llt().solve(b);
            const Eigen::VectorXd x = linear_solve(SparseSymmetricOperator(a.sparseView()), b);
            CHECK((x - oracle).norm() <= 1e-12 * oracle.norm() * 10);
            CHECK((a * x - b).norm() <= 1e-12 * b.norm());
        }
    }
    SUBCASE("Poisson on a twice refined square")
    {
        const auto m = std::make_shared<const TriMesh>(refine_uniform(refine_uniform(*square_mesh(0.25))));
        const QuadratureContext q(*m);
        const auto sys = apply_dirichlet(assemble_stiffness(*m), assemble_load(*constant_field(1.0), q), *m,
                                         *constant_field(0.0));
        const Eigen::VectorXd x = linear_solve(sys.matrix, sys.rhs);
        CHECK((sys.matrix.apply(x) - sys.rhs).norm() <= 1e-12 * sys.rhs.norm());
        const Eigen::VectorXd y = linear_solve(sys.matrix, sys.rhs, 10);  // forces the iterative path
        CHECK((sys.matrix.apply(y) - sys.rhs).norm() <= 1e-12 * sys.rhs.norm());
    }
    SUBCASE("indefinite matrix names the pivot")
    {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
        a(2, 2) = -1.0;
        try {
            (void)linear_solve(SparseSymmetricOperator(a.sparseView()), Eigen::VectorXd::Ones(4));
            FAIL("no error");
        } catch (const SpdError& e) {
            CHECK(e.pivot() == 2);
        }
    }
}
