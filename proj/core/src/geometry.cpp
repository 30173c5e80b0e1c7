#include "plapx/geometry.hpp"

#include "plapx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace plapx {

namespace {

double segment_distance(Point2 p, Point2 a, Point2 b, Point2* closest = nullptr)
{
    const Vec2 ab = b - a;
    const double len2 = norm2(ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Point2 c = a + t * ab;
    if (closest) *closest = c;
    return norm(p - c);
}

}  // namespace

double polygon_area(const std::vector<Point2>& poly)
{
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

ConvexDomain ConvexDomain::polygon(std::vector<Point2> vertices, double corner_radius, int arc_segments)
{
    const std::size_t n = vertices.size();
    if (n < 3) throw GeometryError("convex polygon needs at least 3 vertices, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = vertices[(i + n - 1) % n];
        const Point2& b = vertices[i];
        const Point2& c = vertices[(i + 1) % n];
        if (norm(c - b) == 0.0) throw GeometryError("repeated polygon vertex " + std::to_string(i));
        if (orient(a, b, c) < 0.0)
            throw GeometryError("polygon is not convex and counterclockwise at vertex " + std::to_string(i));
    }
    if (!(polygon_area(vertices) > 0.0)) throw GeometryError("polygon has non-positive area");
    if (arc_segments < 4) throw ParameterError("arc_segments must be >= 4");

    ConvexDomain d;
    d.shape_ = DomainShape::Polygon;
    d.vertices_ = std::move(vertices);
    d.arc_segments_ = arc_segments;
    if (corner_radius < 0.0) throw ParameterError("corner radius must be >= 0");
    if (corner_radius > 0.0) {
        const double half = 0.5 * d.shortest_edge();
        if (!(corner_radius < half))
            throw ParameterError("corner radius " + std::to_string(corner_radius) +
                                 " must be below half the shortest edge (" + std::to_string(half) + ")");
        // acute corners need a longer tangent run than r; both neighbours of an edge share it
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = d.vertices_[(i + n - 1) % n];
            const Point2& b = d.vertices_[i];
            const Point2& c = d.vertices_[(i + 1) % n];
            const Vec2 u = (a - b) * (1.0 / norm(a - b));
            const Vec2 v = (c - b) * (1.0 / norm(c - b));
            const double half_angle = 0.5 * std::acos(std::clamp(dot(u, v), -1.0, 1.0));
            const double tangent = corner_radius / std::tan(half_angle);
            if (!(tangent < 0.5 * std::min(norm(a - b), norm(c - b))))
                throw ParameterError("corner radius too large for the angle at vertex " + std::to_string(i));
        }
    }
    d.corner_radius_ = corner_radius;
    d.build_polyline();
    return d;
}

ConvexDomain ConvexDomain::disk(Point2 center, double radius, int segments)
{
    if (!(radius > 0.0)) throw GeometryError("disk radius must be positive");
    if (segments < 8) throw ParameterError("disk needs at least 8 boundary segments");
    ConvexDomain d;
    d.shape_ = DomainShape::Disk;
    d.center_ = center;
    d.radius_ = radius;
    d.arc_segments_ = segments;
    d.build_polyline();
    return d;
}

ConvexDomain ConvexDomain::unit_square() { return polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}); }

ConvexDomain ConvexDomain::regular_polygon(int sides, double circumradius, Point2 center)
{
    std::vector<Point2> v;
    v.reserve(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
        const double t = 2.0 * std::numbers::pi * k / sides;
        v.push_back({center.x + circumradius * std::cos(t), center.y + circumradius * std::sin(t)});
    }
    return polygon(std::move(v));
}

void ConvexDomain::build_polyline()
{
    polyline_.clear();
    if (shape_ == DomainShape::Disk) {
        for (int k = 0; k < arc_segments_; ++k) {
            const double t = 2.0 * std::numbers::pi * k / arc_segments_;
            polyline_.push_back({center_.x + radius_ * std::cos(t), center_.y + radius_ * std::sin(t)});
        }
    } else if (corner_radius_ == 0.0) {
        polyline_ = vertices_;
    } else {
        const std::size_t n = vertices_.size();
        const double r = corner_radius_;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = vertices_[(i + n - 1) % n];
            const Point2& b = vertices_[i];
            const Point2& c = vertices_[(i + 1) % n];
            const Vec2 u = (a - b) * (1.0 / norm(a - b));
            const Vec2 v = (c - b) * (1.0 / norm(c - b));
            const double half_angle = 0.5 * std::acos(std::clamp(dot(u, v), -1.0, 1.0));
            const double tangent = r / std::tan(half_angle);
            Vec2 bis = u + v;
            bis *= 1.0 / norm(bis);
            const Point2 centre = b + (r / std::sin(half_angle)) * bis;
            const Point2 t0 = b + tangent * u;
            const Point2 t1 = b + tangent * v;
            const double a0 = std::atan2(t0.y - centre.y, t0.x - centre.x);
            double a1 = std::atan2(t1.y - centre.y, t1.x - centre.x);
            while (a1 < a0) a1 += 2.0 * std::numbers::pi;  // counterclockwise sweep
            for (int k = 0; k <= arc_segments_; ++k) {
                if (k == 0) {
                    polyline_.push_back(t0);
                } else if (k == arc_segments_) {
                    polyline_.push_back(t1);
                } else {
                    const double t = a0 + (a1 - a0) * k / arc_segments_;
                    polyline_.push_back({centre.x + r * std::cos(t), centre.y + r * std::sin(t)});
                }
            }
        }
    }
    bbox_min_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    bbox_max_ = -bbox_min_;
    for (const auto& p : polyline_) {
        bbox_min_ = {std::min(bbox_min_.x, p.x), std::min(bbox_min_.y, p.y)};
        bbox_max_ = {std::max(bbox_max_.x, p.x), std::max(bbox_max_.y, p.y)};
    }
}

double ConvexDomain::area() const
{
    if (shape_ == DomainShape::Disk) return std::numbers::pi * radius_ * radius_;
    double a = polygon_area(vertices_);
    if (corner_radius_ > 0.0) {
        // each corner loses the region between its two tangent segments and the arc
        const std::size_t n = vertices_.size();
        const double r = corner_radius_;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& p = vertices_[(i + n - 1) % n];
            const Point2& b = vertices_[i];
            const Point2& c = vertices_[(i + 1) % n];
            const double interior = std::acos(std::clamp(dot(p - b, c - b) / (norm(p - b) * norm(c - b)), -1.0, 1.0));
            const double half = 0.5 * interior;
            const double sweep = std::numbers::pi - interior;
            a -= r * r / std::tan(half) - 0.5 * r * r * sweep;
        }
    }
    return a;
}

double ConvexDomain::polyline_area() const { return polygon_area(polyline_); }

double ConvexDomain::diameter() const
{
    double d = 0.0;
    for (std::size_t i = 0; i < polyline_.size(); ++i)
        for (std::size_t j = i + 1; j < polyline_.size(); ++j) d = std::max(d, norm(polyline_[i] - polyline_[j]));
    return d;
}

double ConvexDomain::shortest_edge() const
{
    const auto& v = shape_ == DomainShape::Disk ? polyline_ : vertices_;
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) s = std::min(s, norm(v[(i + 1) % v.size()] - v[i]));
    return s;
}

bool ConvexDomain::contains(Point2 p, double tol) const
{
    const std::size_t n = polyline_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = polyline_[i];
        const Point2& b = polyline_[(i + 1) % n];
        const double len = norm(b - a);
        if (len == 0.0) continue;
        if (orient(a, b, p) / len < -tol) return false;
    }
    return true;
}

double ConvexDomain::distance_to_boundary(Point2 p) const
{
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = polyline_.size();
    for (std::size_t i = 0; i < n; ++i) d = std::min(d, segment_distance(p, polyline_[i], polyline_[(i + 1) % n]));
    return d;
}

Point2 ConvexDomain::project(Point2 p) const
{
    if (contains(p)) return p;
    double best = std::numeric_limits<double>::infinity();
    Point2 q = p;
    const std::size_t n = polyline_.size();
    for (std::size_t i = 0; i < n; ++i) {
        Point2 c;
        const double d = segment_distance(p, polyline_[i], polyline_[(i + 1) % n], &c);
        if (d < best) {
            best = d;
            q = c;
        }
    }
    return q;
}

ConvexDomain round_corners(const ConvexDomain& dom, double r)
{
    if (dom.shape() != DomainShape::Polygon) throw ParameterError("round_corners needs a polygonal domain");
    if (!(r > 0.0)) throw ParameterError("corner radius must be positive");
    return ConvexDomain::polygon(dom.vertices(), r, dom.arc_segments());
}

std::vector<CurvatureSample> boundary_curvature(const ConvexDomain& dom, int samples_per_edge)
{
    std::vector<CurvatureSample> out;
    if (dom.shape() == DomainShape::Disk) {
        const int n = std::max(8, samples_per_edge * 8);
        for (int k = 0; k < n; ++k) {
            const double t = 2.0 * std::numbers::pi * k / n;
            out.push_back({{dom.center().x + dom.radius() * std::cos(t), dom.center().y + dom.radius() * std::sin(t)},
                           dom.radius() * t,
                           1.0 / dom.radius()});
        }
        return out;
    }
    if (dom.corner_radius() == 0.0)
        throw GeometryError("curvature is undefined at the corners of an exact polygon");

    // The polyline alternates: arc_segments+1 arc points per corner, then a straight edge to
    // the next corner's first tangent point.
    const auto& poly = dom.boundary_polyline();
    const int per_corner = dom.arc_segments() + 1;
    const double kappa = 1.0 / dom.corner_radius();
    const std::size_t n_corners = dom.vertices().size();
    double s = 0.0;
    for (std::size_t c = 0; c < n_corners; ++c) {
        const std::size_t base = c * static_cast<std::size_t>(per_corner);
        for (int k = 0; k < per_corner; ++k) {
            const Point2& p = poly[base + static_cast<std::size_t>(k)];
            if (k > 0) {
                const Point2& prev = poly[base + static_cast<std::size_t>(k) - 1];
                const double chord = norm(p - prev);
                s += 2.0 * dom.corner_radius() * std::asin(std::min(1.0, 0.5 * chord * kappa));
            }
            out.push_back({p, s, kappa});
        }
        const Point2& a = poly[base + static_cast<std::size_t>(per_corner) - 1];
        const Point2& b = poly[((c + 1) % n_corners) * static_cast<std::size_t>(per_corner)];
        const double len = norm(b - a);
        for (int k = 1; k < samples_per_edge; ++k) {
            const double t = static_cast<double>(k) / samples_per_edge;
            out.push_back({a + t * (b - a), s + t * len, 0.0});
        }
        s += len;
    }
    return out;
}

}  // namespace plapx
