#pragma once

#include "plapx/geometry.hpp"
#include "plapx/vec2.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace plapx {

struct BoundaryEdge {
    std::array<int, 2> vertices{};  ///< ordered along the counterclockwise boundary
    int triangle = -1;
    Vec2 outward_normal{};
};

/// Conforming triangulation with boundary markers.
///
/// Triangles are stored counterclockwise. Per-triangle area and gradients of the three
/// barycentric basis functions are cached at construction.
class TriMesh {
public:
    TriMesh() = default;

    /// Throws GeometryError if a triangle is not positively oriented or an edge is shared by
    /// more than two triangles.
    TriMesh(std::vector<Point2> points, std::vector<std::array<int, 3>> triangles, std::vector<char> boundary_flag);

    [[nodiscard]] const std::vector<Point2>& points() const { return points_; }
    [[nodiscard]] const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    [[nodiscard]] const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
    [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
    [[nodiscard]] bool is_boundary(int v) const { return boundary_flag_[static_cast<std::size_t>(v)] != 0; }
    [[nodiscard]] const std::vector<char>& boundary_flags() const { return boundary_flag_; }

    [[nodiscard]] std::size_t num_vertices() const { return points_.size(); }
    [[nodiscard]] std::size_t num_triangles() const { return triangles_.size(); }

    /// Maximum element diameter (longest edge).
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] double area(std::size_t t) const { return area_[t]; }
    [[nodiscard]] double total_area() const;
    /// Gradient of the hat function of local vertex i on triangle t.
    [[nodiscard]] const Vec2& basis_gradient(std::size_t t, int i) const { return grad_[t][static_cast<std::size_t>(i)]; }
    [[nodiscard]] Point2 centroid(std::size_t t) const;

    /// Smallest interior angle over all triangles, in degrees.
    [[nodiscard]] double min_angle_degrees() const;

private:
    std::vector<Point2> points_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<char> boundary_flag_;
    std::vector<int> boundary_vertices_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<double> area_;
    std::vector<std::array<Vec2, 3>> grad_;
    double h_ = 0.0;
};

/// Quality triangulation of a convex domain: boundary polyline subdivided at spacing
/// below `h_target`, an equilateral interior lattice anchored at the origin, Delaunay
/// triangulation, then Delaunay refinement until every triangle has minimum angle above
/// 20.7 degrees and longest edge at most `h_target`. Deterministic for identical inputs.
[[nodiscard]] TriMesh triangulate_convex(const ConvexDomain& dom, double h_target);

/// Red refinement: every triangle split into four by its edge midpoints.
[[nodiscard]] TriMesh refine_uniform(const TriMesh& mesh);

/// Plain-text mesh format:
///   $vertices N / N lines "x y flag" (17 significant digits) / $triangles M / M lines "i j k".
void write_mesh(const TriMesh& mesh, std::ostream& os);
void write_mesh(const TriMesh& mesh, const std::string& path);
[[nodiscard]] TriMesh read_mesh(std::istream& is);

struct MeshLocation {
    int triangle = -1;
    std::array<double, 3> barycentric{};
};

/// Bucket-grid point location.
class PointLocator {
public:
    explicit PointLocator(const TriMesh& mesh);

    /// Points within `tol` (in barycentric coordinates) of a triangle are accepted.
    [[nodiscard]] std::optional<MeshLocation> locate(Point2 p, double tol = 1e-10) const;

private:
    const TriMesh* mesh_;
    Point2 origin_{};
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace plapx
