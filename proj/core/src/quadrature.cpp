#include "plapx/quadrature.hpp"

#include "plapx/error.hpp"

#include <cmath>
#include <numbers>

namespace plapx {

TriangleRule TriangleRule::degree4()
{
    constexpr double a1 = 0.44594849091596488632;
    constexpr double b1 = 1.0 - 2.0 * a1;
    constexpr double w1 = 0.22338158967801146570;
    constexpr double a2 = 0.091576213509770743460;
    constexpr double b2 = 1.0 - 2.0 * a2;
    constexpr double w2 = 0.10995174365532186764;

    TriangleRule r;
    r.degree = 4;
    r.barycentric = {{b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1}, {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
    r.weights = {0.5 * w1, 0.5 * w1, 0.5 * w1, 0.5 * w2, 0.5 * w2, 0.5 * w2};
    return r;
}

QuadratureContext::QuadratureContext(const TriMesh& mesh, TriangleRule rule) : mesh_(&mesh), rule_(std::move(rule))
{
    points_.reserve(mesh.num_triangles() * rule_.weights.size());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const Point2& p0 = mesh.points()[static_cast<std::size_t>(tri[0])];
        const Point2& p1 = mesh.points()[static_cast<std::size_t>(tri[1])];
        const Point2& p2 = mesh.points()[static_cast<std::size_t>(tri[2])];
        const double jac = 2.0 * mesh.area(t);
        for (std::size_t q = 0; q < rule_.weights.size(); ++q) {
            const auto& l = rule_.barycentric[q];
            const Point2 x = l[0] * p0 + l[1] * p1 + l[2] * p2;
            const double w = rule_.weights[q] * jac;
            points_.push_back({x, w, static_cast<int>(t), l});
            measure_ += w;
        }
    }
}

GaussLegendre gauss_legendre(int n)
{
    if (n < 1) throw ParameterError("Gauss-Legendre order must be >= 1");
    GaussLegendre g;
    g.nodes.resize(static_cast<std::size_t>(n));
    g.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[static_cast<std::size_t>(i)] = -x;
        g.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        g.weights[static_cast<std::size_t>(i)] = w;
        g.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return g;
}

}  // namespace plapx
