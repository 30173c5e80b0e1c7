#pragma once

#include "plapx/vec2.hpp"

#include <vector>

namespace plapx {

enum class DomainShape { Polygon, Disk };

/// Convex planar domain: a counterclockwise polygon whose corners may be rounded by circular
/// arcs of a common radius, or a disk. Arcs (and the disk) are represented for meshing by an
/// inscribed polyline; `boundary_polyline()` is the polygon that actually gets triangulated.
class ConvexDomain {
public:
    /// Throws GeometryError for non-convex, clockwise or degenerate input and ParameterError
    /// for an inadmissible corner radius.
    static ConvexDomain polygon(std::vector<Point2> vertices, double corner_radius = 0.0, int arc_segments = 16);
    static ConvexDomain disk(Point2 center, double radius, int segments = 64);
    static ConvexDomain unit_square();
    static ConvexDomain regular_polygon(int sides, double circumradius, Point2 center = {});

    [[nodiscard]] DomainShape shape() const { return shape_; }
    [[nodiscard]] const std::vector<Point2>& vertices() const { return vertices_; }
    [[nodiscard]] double corner_radius() const { return corner_radius_; }
    [[nodiscard]] int arc_segments() const { return arc_segments_; }
    [[nodiscard]] Point2 center() const { return center_; }
    [[nodiscard]] double radius() const { return radius_; }

    [[nodiscard]] const std::vector<Point2>& boundary_polyline() const { return polyline_; }

    /// Area of the ideal domain (exact arcs / exact circle).
    [[nodiscard]] double area() const;
    /// Area enclosed by the boundary polyline.
    [[nodiscard]] double polyline_area() const;
    [[nodiscard]] double diameter() const;
    [[nodiscard]] double shortest_edge() const;

    /// Membership test against the boundary polyline; `tol` widens the domain.
    [[nodiscard]] bool contains(Point2 p, double tol = 0.0) const;
    /// Unsigned distance from p to the boundary polyline.
    [[nodiscard]] double distance_to_boundary(Point2 p) const;
    /// Closest point of the (polyline) domain; identity for interior points.
    [[nodiscard]] Point2 project(Point2 p) const;

    [[nodiscard]] Point2 bbox_min() const { return bbox_min_; }
    [[nodiscard]] Point2 bbox_max() const { return bbox_max_; }

private:
    ConvexDomain() = default;
    void build_polyline();

    DomainShape shape_ = DomainShape::Polygon;
    std::vector<Point2> vertices_;
    double corner_radius_ = 0.0;
    int arc_segments_ = 16;
    Point2 center_{};
    double radius_ = 0.0;
    std::vector<Point2> polyline_;
    Point2 bbox_min_{};
    Point2 bbox_max_{};
};

double polygon_area(const std::vector<Point2>& poly);

/// Inscribed convex approximant whose corners are circular arcs of radius r.
/// Requires 0 < r < half the shortest edge (ParameterError otherwise).
[[nodiscard]] ConvexDomain round_corners(const ConvexDomain& dom, double r);

struct CurvatureSample {
    Point2 point;
    double arclength = 0.0;
    double curvature = 0.0;
};

/// Curvature of the ideal boundary: 0 on straight edges, 1/r on rounded arcs, 1/R on a disk.
/// An exact polygon has no curvature at its corners and is rejected with GeometryError.
[[nodiscard]] std::vector<CurvatureSample> boundary_curvature(const ConvexDomain& dom, int samples_per_edge = 8);

}  // namespace plapx
