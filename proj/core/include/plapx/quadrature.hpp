#pragma once

#include "plapx/mesh.hpp"
#include "plapx/vec2.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace plapx {

/// Symmetric quadrature on the reference triangle {(s,t): s,t >= 0, s+t <= 1}.
/// Weights sum to the reference area 1/2.
struct TriangleRule {
    std::vector<std::array<double, 3>> barycentric;
    std::vector<double> weights;
    int degree = 0;

    /// Six-point rule exact for polynomials of degree 4.
    static TriangleRule degree4();
};

struct QuadPoint {
    Point2 x;
    double weight = 0.0;  ///< physical weight
    int triangle = -1;
    std::array<double, 3> barycentric{};
};

/// Quadrature points of a mesh, laid out triangle by triangle
/// (`points_per_triangle()` consecutive entries per element).
class QuadratureContext {
public:
    explicit QuadratureContext(const TriMesh& mesh, TriangleRule rule = TriangleRule::degree4());

    [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const TriangleRule& rule() const { return rule_; }
    [[nodiscard]] std::span<const QuadPoint> points() const { return points_; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] std::size_t points_per_triangle() const { return rule_.weights.size(); }
    [[nodiscard]] double measure() const { return measure_; }

private:
    const TriMesh* mesh_;
    TriangleRule rule_;
    std::vector<QuadPoint> points_;
    double measure_ = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] GaussLegendre gauss_legendre(int n);

}  // namespace plapx
