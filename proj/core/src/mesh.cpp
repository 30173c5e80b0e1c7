#include "plapx/mesh.hpp"

#include "plapx/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace plapx {

namespace {

std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

}  // namespace

TriMesh::TriMesh(std::vector<Point2> points, std::vector<std::array<int, 3>> triangles, std::vector<char> boundary_flag)
    : points_(std::move(points)), triangles_(std::move(triangles)), boundary_flag_(std::move(boundary_flag))
{
    const auto nv = static_cast<int>(points_.size());
    if (boundary_flag_.size() != points_.size()) throw GeometryError("boundary flag count does not match vertex count");

    area_.resize(triangles_.size());
    grad_.resize(triangles_.size());
    struct EdgeUse {
        int count = 0;
        int triangle = -1;
        int a = -1;
        int b = -1;
    };
    std::unordered_map<std::uint64_t, EdgeUse> edges;
    edges.reserve(triangles_.size() * 2);
    std::vector<std::uint64_t> edge_order;
    edge_order.reserve(triangles_.size() * 3);

    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri)
            if (v < 0 || v >= nv) throw GeometryError("triangle " + std::to_string(t) + " references a missing vertex");
        const Point2& p0 = points_[static_cast<std::size_t>(tri[0])];
        const Point2& p1 = points_[static_cast<std::size_t>(tri[1])];
        const Point2& p2 = points_[static_cast<std::size_t>(tri[2])];
        const double twice = orient(p0, p1, p2);
        if (!(twice > 0.0)) throw GeometryError("triangle " + std::to_string(t) + " is not positively oriented");
        area_[t] = 0.5 * twice;
        grad_[t] = {Vec2{(p1.y - p2.y) / twice, (p2.x - p1.x) / twice},
                    Vec2{(p2.y - p0.y) / twice, (p0.x - p2.x) / twice},
                    Vec2{(p0.y - p1.y) / twice, (p1.x - p0.x) / twice}};
        for (int i = 0; i < 3; ++i) {
            const int a = tri[static_cast<std::size_t>(i)];
            const int b = tri[static_cast<std::size_t>((i + 1) % 3)];
            h_ = std::max(h_, norm(points_[static_cast<std::size_t>(b)] - points_[static_cast<std::size_t>(a)]));
            auto [it, inserted] = edges.try_emplace(edge_key(a, b));
            if (inserted) edge_order.push_back(it->first);
            auto& use = it->second;
            if (++use.count > 2)
                throw GeometryError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                    ") is shared by more than two triangles");
            use.triangle = static_cast<int>(t);
            use.a = a;
            use.b = b;
        }
    }
    for (auto key : edge_order) {
        const auto& use = edges.at(key);
        if (use.count != 1) continue;
        const Vec2 d = points_[static_cast<std::size_t>(use.b)] - points_[static_cast<std::size_t>(use.a)];
        const double len = norm(d);
        boundary_edges_.push_back({{use.a, use.b}, use.triangle, Vec2{d.y / len, -d.x / len}});
    }
    for (int v = 0; v < nv; ++v)
        if (boundary_flag_[static_cast<std::size_t>(v)]) boundary_vertices_.push_back(v);
}

double TriMesh::total_area() const
{
    double s = 0.0;
    for (double a : area_) s += a;
    return s;
}

Point2 TriMesh::centroid(std::size_t t) const
{
    const auto& tri = triangles_[t];
    Point2 c{};
    for (int v : tri) c += points_[static_cast<std::size_t>(v)];
    return c * (1.0 / 3.0);
}

double TriMesh::min_angle_degrees() const
{
    double m = 180.0;
    for (const auto& tri : triangles_) {
        for (int i = 0; i < 3; ++i) {
            const Point2& a = points_[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
            const Point2& b = points_[static_cast<std::size_t>(tri[static_cast<std::size_t>((i + 1) % 3)])];
            const Point2& c = points_[static_cast<std::size_t>(tri[static_cast<std::size_t>((i + 2) % 3)])];
            const double ang = std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a));
            m = std::min(m, ang * 180.0 / std::numbers::pi);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------------------
// Delaunay refinement mesher
// ---------------------------------------------------------------------------------------

namespace {

struct DTri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] lies across the edge opposite v[i]
    bool alive = true;
};

bool in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double al = adx * adx + ady * ady;
    const double bl = bdx * bdx + bdy * bdy;
    const double cl = cdx * cdx + cdy * cdy;
    const double det = al * (bdx * cdy - cdx * bdy) + bl * (cdx * ady - adx * cdy) + cl * (adx * bdy - bdx * ady);
    const double perm = al * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) + bl * (std::abs(cdx * ady) + std::abs(adx * cdy)) +
                        cl * (std::abs(adx * bdy) + std::abs(bdx * ady));
    return det > 1e-12 * perm;
}

Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c)
{
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = norm2(ab);
    const double ac2 = norm2(ac);
    return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

class Builder {
public:
    std::vector<Point2> pts;
    std::vector<char> bflag;
    std::vector<DTri> tris;

    [[nodiscard]] const Point2& P(int i) const { return pts[static_cast<std::size_t>(i)]; }
    DTri& T(int t) { return tris[static_cast<std::size_t>(t)]; }

    static int local_of(const DTri& t, int v)
    {
        for (int i = 0; i < 3; ++i)
            if (t.v[static_cast<std::size_t>(i)] == v) return i;
        return -1;
    }

    void replace_neighbor(int t, int old_nb, int new_nb)
    {
        if (t < 0) return;
        for (auto& n : T(t).nb)
            if (n == old_nb) {
                n = new_nb;
                return;
            }
    }

    int add_tri(std::array<int, 3> v, std::array<int, 3> nb)
    {
        tris.push_back({v, nb, true});
        return static_cast<int>(tris.size()) - 1;
    }

    void fan(int centre, const std::vector<int>& ring)
    {
        const int m = static_cast<int>(ring.size());
        const int base = static_cast<int>(tris.size());
        for (int i = 0; i < m; ++i) {
            const int next = base + (i + 1) % m;
            const int prev = base + (i + m - 1) % m;
            add_tri({centre, ring[static_cast<std::size_t>(i)], ring[static_cast<std::size_t>((i + 1) % m)]}, {-1, next, prev});
        }
    }

    // Flip the edge opposite local vertex k of triangle t. Returns false if there is no neighbour.
    bool flip(int t, int k)
    {
        const int o = T(t).nb[static_cast<std::size_t>(k)];
        if (o < 0) return false;
        const DTri tt = T(t);
        const DTri oo = T(o);
        const int c = tt.v[static_cast<std::size_t>(k)];
        const int a = tt.v[static_cast<std::size_t>((k + 1) % 3)];
        const int b = tt.v[static_cast<std::size_t>((k + 2) % 3)];
        const int la = local_of(oo, a);
        const int lb = local_of(oo, b);
        const int d = oo.v[static_cast<std::size_t>(3 - la - lb)];
        const int n_ad = oo.nb[static_cast<std::size_t>(lb)];
        const int n_db = oo.nb[static_cast<std::size_t>(la)];
        const int n_ca = tt.nb[static_cast<std::size_t>((k + 2) % 3)];
        const int n_bc = tt.nb[static_cast<std::size_t>((k + 1) % 3)];
        T(t) = {{c, a, d}, {n_ad, o, n_ca}, true};
        T(o) = {{c, d, b}, {n_db, n_bc, t}, true};
        replace_neighbor(n_ad, o, t);
        replace_neighbor(n_bc, t, o);
        return true;
    }

    bool needs_flip(int t, int k)
    {
        const int o = T(t).nb[static_cast<std::size_t>(k)];
        if (o < 0) return false;
        const DTri& tt = T(t);
        const DTri& oo = T(o);
        const int a = tt.v[static_cast<std::size_t>((k + 1) % 3)];
        const int b = tt.v[static_cast<std::size_t>((k + 2) % 3)];
        const int d = oo.v[static_cast<std::size_t>(3 - local_of(oo, a) - local_of(oo, b))];
        return in_circle(P(tt.v[0]), P(tt.v[1]), P(tt.v[2]), P(d));
    }

    // Restore the Delaunay property around a freshly inserted vertex p.
    void legalize(std::vector<std::pair<int, int>> stack, int p)
    {
        std::size_t guard = 0;
        while (!stack.empty()) {
            auto [t, k] = stack.back();
            stack.pop_back();
            if (T(t).v[static_cast<std::size_t>(k)] != p) {
                k = local_of(T(t), p);
                if (k < 0) continue;
            }
            if (!needs_flip(t, k)) continue;
            if (++guard > 100000000) throw GeometryError("edge flipping did not terminate");
            const int o = T(t).nb[static_cast<std::size_t>(k)];
            flip(t, k);
            stack.emplace_back(t, 0);  // (p, a, d): edge a-d
            stack.emplace_back(o, 0);  // (p, d, b): edge d-b
        }
    }

    void make_delaunay()
    {
        for (int sweep = 0; sweep < 10000; ++sweep) {
            bool changed = false;
            for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
                if (!T(t).alive) continue;
                for (int k = 0; k < 3; ++k) {
                    if (needs_flip(t, k)) {
                        flip(t, k);
                        changed = true;
                    }
                }
            }
            if (!changed) return;
        }
        throw GeometryError("initial Delaunay flipping did not terminate");
    }

    enum class Where { Inside, OnEdge, Outside };
    struct Hit {
        Where where;
        int tri;
        int local;  // edge index for OnEdge / Outside
    };

    static double orient_tol(const Point2& a, const Point2& b) { return 1e-10 * norm2(b - a); }

    Hit walk(int start, const Point2& p)
    {
        int t = start;
        const std::size_t limit = 4 * tris.size() + 16;
        for (std::size_t step = 0; step < limit; ++step) {
            const DTri& tt = T(t);
            int move = -1;
            double worst = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Point2& a = P(tt.v[static_cast<std::size_t>((i + 1) % 3)]);
                const Point2& b = P(tt.v[static_cast<std::size_t>((i + 2) % 3)]);
                const double o = orient(a, b, p);
                if (o < -orient_tol(a, b) && o < worst) {
                    worst = o;
                    move = i;
                }
            }
            if (move < 0) {
                for (int i = 0; i < 3; ++i) {
                    const Point2& a = P(tt.v[static_cast<std::size_t>((i + 1) % 3)]);
                    const Point2& b = P(tt.v[static_cast<std::size_t>((i + 2) % 3)]);
                    if (std::abs(orient(a, b, p)) <= orient_tol(a, b)) return {Where::OnEdge, t, i};
                }
                return {Where::Inside, t, -1};
            }
            const int n = tt.nb[static_cast<std::size_t>(move)];
            if (n < 0) return {Where::Outside, t, move};
            t = n;
        }
        // fall back to exhaustive search
        for (int s = 0; s < static_cast<int>(tris.size()); ++s) {
            if (!T(s).alive) continue;
            const DTri& tt = T(s);
            bool inside = true;
            for (int i = 0; i < 3 && inside; ++i)
                inside = orient(P(tt.v[static_cast<std::size_t>((i + 1) % 3)]), P(tt.v[static_cast<std::size_t>((i + 2) % 3)]), p) >= 0.0;
            if (inside) return {Where::Inside, s, -1};
        }
        throw GeometryError("point location failed during triangulation");
    }

    int add_point(Point2 p, bool boundary)
    {
        pts.push_back(p);
        bflag.push_back(boundary ? 1 : 0);
        return static_cast<int>(pts.size()) - 1;
    }

    void insert_inside(int t, int p)
    {
        const DTri old = T(t);
        const int v0 = old.v[0], v1 = old.v[1], v2 = old.v[2];
        const int n0 = old.nb[0], n1 = old.nb[1], n2 = old.nb[2];
        const int b = static_cast<int>(tris.size());
        const int c = b + 1;
        T(t) = {{p, v0, v1}, {n2, b, c}, true};  // edge v0-v1 opposite p
        add_tri({p, v1, v2}, {n0, c, t});
        add_tri({p, v2, v0}, {n1, t, b});
        replace_neighbor(n0, t, b);
        replace_neighbor(n1, t, c);
        legalize({{t, 0}, {b, 0}, {c, 0}}, p);
    }

    // Split the edge opposite local vertex k of triangle t with point p.
    void insert_on_edge(int t, int k, int p)
    {
        const DTri tt = T(t);
        const int c = tt.v[static_cast<std::size_t>(k)];
        const int a = tt.v[static_cast<std::size_t>((k + 1) % 3)];
        const int b = tt.v[static_cast<std::size_t>((k + 2) % 3)];
        const int o = tt.nb[static_cast<std::size_t>(k)];
        const int n_ca = tt.nb[static_cast<std::size_t>((k + 2) % 3)];
        const int n_bc = tt.nb[static_cast<std::size_t>((k + 1) % 3)];

        const int t2 = static_cast<int>(tris.size());
        if (o < 0) {
            T(t) = {{p, c, a}, {n_ca, -1, t2}, true};
            add_tri({p, b, c}, {n_bc, t, -1});
            replace_neighbor(n_bc, t, t2);
            legalize({{t, 0}, {t2, 0}}, p);
            return;
        }
        const DTri oo = T(o);
        const int la = local_of(oo, a);
        const int lb = local_of(oo, b);
        const int d = oo.v[static_cast<std::size_t>(3 - la - lb)];
        const int n_ad = oo.nb[static_cast<std::size_t>(lb)];
        const int n_db = oo.nb[static_cast<std::size_t>(la)];
        const int o2 = t2 + 1;
        // t: (p, c, a)   t2: (p, b, c)   o: (p, d, b)   o2: (p, a, d)
        T(t) = {{p, c, a}, {n_ca, o2, t2}, true};
        add_tri({p, b, c}, {n_bc, t, o});
        T(o) = {{p, d, b}, {n_db, t2, o2}, true};
        add_tri({p, a, d}, {n_ad, o, t});
        replace_neighbor(n_bc, t, t2);
        replace_neighbor(n_ad, o, o2);
        legalize({{t, 0}, {t2, 0}, {o, 0}, {o2, 0}}, p);
    }

    void split_boundary_edge(int t, int k)
    {
        const DTri& tt = T(t);
        const int a = tt.v[static_cast<std::size_t>((k + 1) % 3)];
        const int b = tt.v[static_cast<std::size_t>((k + 2) % 3)];
        const int p = add_point(0.5 * (P(a) + P(b)), true);
        insert_on_edge(t, k, p);
    }

    void insert(int p, int hint)
    {
        const Hit hit = walk(hint, P(p));
        if (hit.where == Where::Outside) throw GeometryError("interior point lies outside the boundary polygon");
        if (hit.where == Where::OnEdge)
            insert_on_edge(hit.tri, hit.local, p);
        else
            insert_inside(hit.tri, p);
    }
};

double longest_edge(const Point2& a, const Point2& b, const Point2& c)
{
    return std::max({norm(b - a), norm(c - b), norm(a - c)});
}

}  // namespace

TriMesh triangulate_convex(const ConvexDomain& dom, double h_target)
{
    if (!(h_target > 0.0)) throw ParameterError("h_target must be positive");
    const auto& poly = dom.boundary_polyline();
    if (poly.size() < 3 || !(dom.polyline_area() > 0.0)) throw GeometryError("degenerate boundary polygon");

    const double spacing = 0.9 * h_target;
    Builder B;

    // boundary points, counterclockwise
    std::vector<int> ring;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        const double len = norm(b - a);
        if (len == 0.0) continue;
        const int k = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
        for (int j = 0; j < k; ++j) {
            const double t = static_cast<double>(j) / k;
            ring.push_back(B.add_point(a + t * (b - a), true));
        }
    }

    // equilateral lattice anchored at the origin, kept away from the boundary
    const double dy = spacing * std::sqrt(3.0) / 2.0;
    const Point2 lo = dom.bbox_min();
    const Point2 hi = dom.bbox_max();
    const auto j0 = static_cast<long>(std::floor(lo.y / dy));
    const auto j1 = static_cast<long>(std::ceil(hi.y / dy));
    std::vector<int> lattice;
    for (long j = j0; j <= j1; ++j) {
        const double y = static_cast<double>(j) * dy;
        const double shift = (j % 2 != 0) ? 0.5 * spacing : 0.0;
        const auto i0 = static_cast<long>(std::floor((lo.x - shift) / spacing));
        const auto i1 = static_cast<long>(std::ceil((hi.x - shift) / spacing));
        for (long i = i0; i <= i1; ++i) {
            const Point2 p{static_cast<double>(i) * spacing + shift, y};
            if (!dom.contains(p)) continue;
            if (dom.distance_to_boundary(p) < 0.5 * spacing) continue;
            lattice.push_back(B.add_point(p, false));
        }
    }

    // fan from the interior point nearest the centroid of the boundary points
    Point2 centroid{};
    for (int v : ring) centroid += B.P(v);
    centroid *= 1.0 / static_cast<double>(ring.size());
    int centre = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int v : lattice) {
        const double d = norm(B.P(v) - centroid);
        if (d < best) {
            best = d;
            centre = v;
        }
    }
    if (centre < 0) centre = B.add_point(centroid, false);
    B.fan(centre, ring);
    B.make_delaunay();

    int hint = 0;
    for (int v : lattice) {
        if (v == centre) continue;
        B.insert(v, hint);
        hint = static_cast<int>(B.tris.size()) - 1;
    }

    // Delaunay refinement: split encroached boundary segments, then insert circumcentres of
    // triangles that are too large or have radius-edge ratio above sqrt(2).
    const double ratio_bound = std::sqrt(2.0);
    const std::size_t max_points = 200 * B.pts.size() + 200000;
    auto encroached_segment = [&](const Point2& q, int& out_t, int& out_k) {
        for (int t = 0; t < static_cast<int>(B.tris.size()); ++t) {
            const DTri& tt = B.tris[static_cast<std::size_t>(t)];
            if (!tt.alive) continue;
            for (int k = 0; k < 3; ++k) {
                if (tt.nb[static_cast<std::size_t>(k)] >= 0) continue;
                const Point2& a = B.P(tt.v[static_cast<std::size_t>((k + 1) % 3)]);
                const Point2& b = B.P(tt.v[static_cast<std::size_t>((k + 2) % 3)]);
                if (dot(a - q, b - q) < -1e-12 * norm2(b - a)) {
                    out_t = t;
                    out_k = k;
                    return true;
                }
            }
        }
        return false;
    };

    for (;;) {
        if (B.pts.size() > max_points) throw GeometryError("mesh refinement did not terminate");

        // 1. segments encroached by their own apex
        bool split_any = false;
        for (int t = 0; t < static_cast<int>(B.tris.size()); ++t) {
            for (int k = 0; k < 3; ++k) {
                const DTri& tt = B.tris[static_cast<std::size_t>(t)];
                if (tt.nb[static_cast<std::size_t>(k)] >= 0) continue;
                const Point2& apex = B.P(tt.v[static_cast<std::size_t>(k)]);
                const Point2& a = B.P(tt.v[static_cast<std::size_t>((k + 1) % 3)]);
                const Point2& b = B.P(tt.v[static_cast<std::size_t>((k + 2) % 3)]);
                if (dot(a - apex, b - apex) < -1e-12 * norm2(b - a)) {
                    B.split_boundary_edge(t, k);
                    split_any = true;
                    break;
                }
            }
        }
        if (split_any) continue;

        // 2. first bad triangle in index order
        int bad = -1;
        for (int t = 0; t < static_cast<int>(B.tris.size()); ++t) {
            const DTri& tt = B.tris[static_cast<std::size_t>(t)];
            const Point2& a = B.P(tt.v[0]);
            const Point2& b = B.P(tt.v[1]);
            const Point2& c = B.P(tt.v[2]);
            const double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
            const double area2 = orient(a, b, c);
            const double circum_r = la * lb * lc / (2.0 * area2);
            const double shortest = std::min({la, lb, lc});
            if (longest_edge(a, b, c) > h_target * (1.0 + 1e-12) || circum_r > ratio_bound * shortest) {
                bad = t;
                break;
            }
        }
        if (bad < 0) break;

        const DTri& tb = B.tris[static_cast<std::size_t>(bad)];
        const Point2 cc = circumcenter(B.P(tb.v[0]), B.P(tb.v[1]), B.P(tb.v[2]));
        const auto hit = B.walk(bad, cc);
        if (hit.where == Builder::Where::Outside) {
            B.split_boundary_edge(hit.tri, hit.local);
            continue;
        }
        int et = -1, ek = -1;
        if (encroached_segment(cc, et, ek)) {
            B.split_boundary_edge(et, ek);
            continue;
        }
        const int p = B.add_point(cc, false);
        if (hit.where == Builder::Where::OnEdge)
            B.insert_on_edge(hit.tri, hit.local, p);
        else
            B.insert_inside(hit.tri, p);
    }

    std::vector<std::array<int, 3>> tris;
    tris.reserve(B.tris.size());
    for (const auto& t : B.tris)
        if (t.alive) tris.push_back(t.v);
    TriMesh mesh(std::move(B.pts), std::move(tris), std::move(B.bflag));
    if (mesh.min_angle_degrees() < 20.0) throw GeometryError("triangulation failed to reach the 20 degree angle bound");
    return mesh;
}

TriMesh refine_uniform(const TriMesh& mesh)
{
    std::vector<Point2> pts = mesh.points();
    std::vector<char> flags = mesh.boundary_flags();
    std::unordered_map<std::uint64_t, int> midpoint;
    midpoint.reserve(mesh.num_triangles() * 2);

    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(mesh.num_triangles() * 2);
    for (const auto& tri : mesh.triangles())
        for (int i = 0; i < 3; ++i) ++edge_count[edge_key(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>((i + 1) % 3)])];

    auto mid = [&](int a, int b) {
        const auto key = edge_key(a, b);
        auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(pts.size()));
        if (inserted) {
            pts.push_back(0.5 * (pts[static_cast<std::size_t>(a)] + pts[static_cast<std::size_t>(b)]));
            flags.push_back(edge_count.at(key) == 1 ? 1 : 0);
        }
        return it->second;
    };

    std::vector<std::array<int, 3>> tris;
    tris.reserve(4 * mesh.num_triangles());
    for (const auto& tri : mesh.triangles()) {
        const int v0 = tri[0], v1 = tri[1], v2 = tri[2];
        const int m01 = mid(v0, v1);
        const int m12 = mid(v1, v2);
        const int m20 = mid(v2, v0);
        tris.push_back({v0, m01, m20});
        tris.push_back({v1, m12, m01});
        tris.push_back({v2, m20, m12});
        tris.push_back({m01, m12, m20});
    }
    return TriMesh(std::move(pts), std::move(tris), std::move(flags));
}

void write_mesh(const TriMesh& mesh, std::ostream& os)
{
    char buf[128];
    os << "$vertices " << mesh.num_vertices() << '\n';
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const auto& p = mesh.points()[v];
        std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", p.x, p.y, mesh.is_boundary(static_cast<int>(v)) ? 1 : 0);
        os << buf;
    }
    os << "$triangles " << mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const TriMesh& mesh, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot open mesh output file '" + path + "'");
    write_mesh(mesh, os);
}

TriMesh read_mesh(std::istream& is)
{
    std::string tag;
    std::size_t n = 0;
    if (!(is >> tag >> n) || tag != "$vertices") throw GeometryError("mesh file: expected '$vertices N'");
    std::vector<Point2> pts(n);
    std::vector<char> flags(n);
    for (std::size_t i = 0; i < n; ++i) {
        int f = 0;
        if (!(is >> pts[i].x >> pts[i].y >> f)) throw GeometryError("mesh file: bad vertex line " + std::to_string(i));
        flags[i] = f != 0 ? 1 : 0;
    }
    std::size_t m = 0;
    if (!(is >> tag >> m) || tag != "$triangles") throw GeometryError("mesh file: expected '$triangles M'");
    std::vector<std::array<int, 3>> tris(m);
    for (std::size_t t = 0; t < m; ++t)
        if (!(is >> tris[t][0] >> tris[t][1] >> tris[t][2])) throw GeometryError("mesh file: bad triangle line " + std::to_string(t));
    return TriMesh(std::move(pts), std::move(tris), std::move(flags));
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh)
{
    Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi = -lo;
    for (const auto& p : mesh.points()) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
    const double target = std::sqrt(std::max(mesh.total_area(), 1e-300) / std::max<std::size_t>(1, mesh.num_triangles())) * 2.0;
    cell_ = std::max(target, extent / 1024.0);
    origin_ = lo;
    nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_)) + 1);
    buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
        for (int v : mesh.triangles()[t]) {
            const auto& p = mesh.points()[static_cast<std::size_t>(v)];
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        const int i0 = std::clamp(static_cast<int>(std::floor((x0 - origin_.x) / cell_)), 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>(std::floor((x1 - origin_.x) / cell_)), 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>(std::floor((y0 - origin_.y) / cell_)), 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>(std::floor((y1 - origin_.y) / cell_)), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)].push_back(static_cast<int>(t));
    }
}

std::optional<MeshLocation> PointLocator::locate(Point2 p, double tol) const
{
    const int i = static_cast<int>(std::floor((p.x - origin_.x) / cell_));
    const int j = static_cast<int>(std::floor((p.y - origin_.y) / cell_));
    std::optional<MeshLocation> best;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
            for (int t : buckets_[static_cast<std::size_t>(jj) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ii)]) {
                const auto& tri = mesh_->triangles()[static_cast<std::size_t>(t)];
                const auto& a = mesh_->points()[static_cast<std::size_t>(tri[0])];
                const auto& b = mesh_->points()[static_cast<std::size_t>(tri[1])];
                const auto& c = mesh_->points()[static_cast<std::size_t>(tri[2])];
                const double twice = orient(a, b, c);
                const std::array<double, 3> bary{orient(p, b, c) / twice, orient(a, p, c) / twice, orient(a, b, p) / twice};
                const double m = std::min({bary[0], bary[1], bary[2]});
                if (m >= 0.0) return MeshLocation{t, bary};
                if (m >= -tol && m > best_min) {
                    best_min = m;
                    best = MeshLocation{t, bary};
                }
            }
        }
    }
    return best;
}

}  // namespace plapx
