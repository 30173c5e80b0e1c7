#include "doctest.h"

#include "plapx/error.hpp"
#include "plapx/geometry.hpp"
#include "plapx/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace plapx;

namespace {

double triangle_area_sum(const TriMesh& m)
{
    double s = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) s += m.area(t);
    return s;
}

// every edge in at most two triangles, boundary edges in exactly one
void check_conforming(const TriMesh& m)
{
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : m.triangles()) {
        const auto& P = m.points();
        CHECK(orient(P[static_cast<std::size_t>(t[0])], P[static_cast<std::size_t>(t[1])],
                     P[static_cast<std::size_t>(t[2])]) > 0.0);
        for (int k = 0; k < 3; ++k) {
            int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            ++count[{a, b}];
        }
    }
    std::size_t once = 0;
    for (const auto& [e, c] : count) {
        CHECK(c <= 2);
        if (c == 1) {
            ++once;
            CHECK(m.is_boundary(e.first));
            CHECK(m.is_boundary(e.second));
        }
    }
    CHECK(once == m.boundary_edges().size());
}

}  // namespace

TEST_CASE("domain validation")
{
    CHECK_THROWS_AS((void)ConvexDomain::polygon({{0, 0}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS((void)ConvexDomain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS((void)ConvexDomain::polygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 1}, {0, 1}}), GeometryError);
    CHECK_THROWS_AS((void)ConvexDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0.5), ParameterError);
    CHECK_THROWS_AS((void)round_corners(ConvexDomain::unit_square(), 0.6), ParameterError);
    CHECK_THROWS_AS((void)round_corners(ConvexDomain::unit_square(), 0.0), ParameterError);
}

TEST_CASE("triangulation of polygons")
{
    SUBCASE("unit square, h = 0.5")
    {
        const auto m = triangulate_convex(ConvexDomain::unit_square(), 0.5);
        CHECK(triangle_area_sum(m) == doctest::Approx(1.0).epsilon(1e-12));
        check_conforming(m);
    }
    SUBCASE("unit square, h = 0.25")
    {
        const auto m = triangulate_convex(ConvexDomain::unit_square(), 0.25);
        CHECK(m.h() <= 0.25);
        CHECK(m.min_angle_degrees() >= 20.0);
        check_conforming(m);
        for (int v : m.boundary_vertices()) {
            const Point2 x = m.points()[static_cast<std::size_t>(v)];
            CHECK(std::min({x.x, x.y, 1 - x.x, 1 - x.y}) <= 1e-14);
        }
    }
    SUBCASE("regular hexagon")
    {
        const auto m = triangulate_convex(ConvexDomain::regular_polygon(6, 1.0), 0.2);
        CHECK(triangle_area_sum(m) == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-10));
        CHECK(m.min_angle_degrees() >= 20.0);
        check_conforming(m);
    }
    SUBCASE("rounded square and disk cover their polylines")
    {
        for (const auto& dom : {round_corners(ConvexDomain::unit_square(), 0.1), ConvexDomain::disk({0, 0}, 1.0)}) {
            const auto m = triangulate_convex(dom, 0.1);
            CHECK(triangle_area_sum(m) == doctest::Approx(dom.polyline_area()).epsilon(1e-10));
            CHECK(m.min_angle_degrees() >= 20.0);
            CHECK(m.h() <= 0.1);
            check_conforming(m);
        }
    }
    CHECK_THROWS((void)triangulate_convex(ConvexDomain::unit_square(), 0.0));
}

TEST_CASE("triangulation is deterministic")
{
    const auto dom = round_corners(ConvexDomain::unit_square(), 0.05);
    std::ostringstream a, b;
    write_mesh(triangulate_convex(dom, 0.07), a);
    write_mesh(triangulate_convex(dom, 0.07), b);
    CHECK(a.str() == b.str());
}

TEST_CASE("uniform refinement")
{
    const auto dom = ConvexDomain::regular_polygon(5, 1.0);
    const auto m = triangulate_convex(dom, 0.3);
    const auto r = refine_uniform(m);
    CHECK(r.num_triangles() == 4 * m.num_triangles());
    CHECK(r.h() == doctest::Approx(m.h() / 2).epsilon(1e-12));
    CHECK(triangle_area_sum(r) == doctest::Approx(triangle_area_sum(m)).epsilon(1e-12));
    // V' = V + E
    std::set<std::pair<int, int>> edges;
    for (const auto& t : m.triangles())
        for (int k = 0; k < 3; ++k)
            edges.insert(std::minmax(t[static_cast<std::size_t>(k)], t[static_cast<std::size_t>((k + 1) % 3)]));
    CHECK(r.num_vertices() == m.num_vertices() + edges.size());
    check_conforming(r);
    for (int v : r.boundary_vertices()) CHECK(dom.distance_to_boundary(r.points()[static_cast<std::size_t>(v)]) <= 1e-14);
}

TEST_CASE("mesh file round trip is bit exact")
{
    const auto m = triangulate_convex(ConvexDomain::disk({0.1, -0.2}, 0.7, 40), 0.15);
    std::ostringstream os;
    write_mesh(m, os);
    std::istringstream is(os.str());
    const auto back = read_mesh(is);
    CHECK(back.points() == m.points());
    CHECK(back.triangles() == m.triangles());
    CHECK(back.boundary_flags() == m.boundary_flags());
    CHECK(os.str().rfind("$vertices ", 0) == 0);
}

TEST_CASE("corner rounding area deficit")
{
    const auto sq = ConvexDomain::unit_square();
    double prev = -1.0;
    for (int m = 1; m <= 6; ++m) {
        const double r = 0.4 / std::pow(2.0, m);
        const auto om = round_corners(sq, r);
        CHECK(om.area() == doctest::Approx(1.0 - (4.0 - std::numbers::pi) * r * r).epsilon(1e-14));
        // oracle: each of the 4 quarter arcs loses n circular segments of angle pi/(2n)
        const int n = om.arc_segments();
        const double th = std::numbers::pi / (2.0 * n);
        const double segments = 4.0 * n * 0.5 * r * r * (th - std::sin(th));
        CHECK(1.0 - om.polyline_area() == doctest::Approx((4.0 - std::numbers::pi) * r * r + segments).epsilon(1e-9));
        const double deficit = 1.0 - om.polyline_area();
        if (prev >= 0.0) CHECK(deficit < prev);
        prev = deficit;

        const auto& poly = om.boundary_polyline();
        for (std::size_t i = 0; i < poly.size(); ++i)
            CHECK(orient(poly[i], poly[(i + 1) % poly.size()], poly[(i + 2) % poly.size()]) >= -1e-15);
        for (const auto& x : poly) CHECK(sq.contains(x, 1e-14));
    }
}

TEST_CASE("boundary curvature")
{
    for (const auto& s : boundary_curvature(ConvexDomain::disk({0, 0}, 1.0))) CHECK(s.curvature == 1.0);
    std::set<double> values;
    for (const auto& s : boundary_curvature(round_corners(ConvexDomain::unit_square(), 0.1))) {
        CHECK(s.curvature >= 0.0);
        values.insert(s.curvature);
    }
    CHECK(values == std::set<double>{0.0, 1.0 / 0.1});
    CHECK_THROWS_AS((void)boundary_curvature(ConvexDomain::unit_square()), GeometryError);
}

TEST_CASE("point location")
{
    const auto m = triangulate_convex(ConvexDomain::unit_square(), 0.1);
    const PointLocator loc(m);
    for (const Point2 x : {Point2{0.31, 0.77}, Point2{0.0, 0.0}, Point2{1.0, 0.5}}) {
        const auto l = loc.locate(x);
        REQUIRE(l.has_value());
        const auto& t = m.triangles()[static_cast<std::size_t>(l->triangle)];
        Point2 y{0, 0};
        for (int k = 0; k < 3; ++k) y += l->barycentric[static_cast<std::size_t>(k)] * m.points()[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
        CHECK(y.x == doctest::Approx(x.x).epsilon(1e-12));
        CHECK(y.y == doctest::Approx(x.y).epsilon(1e-12));
    }
    CHECK_FALSE(loc.locate({1.5, 0.5}).has_value());
}
