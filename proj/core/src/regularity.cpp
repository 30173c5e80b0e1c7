#include "plapx/regularity.hpp"

#include "plapx/error.hpp"
#include "plapx/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace plapx {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<CoefficientSample> coefficients(const P1Function& u, const ExponentField& p, const ScalarFunction& f,
                                            double eps, std::span<const Point2> pts)
{
    if (!(eps > 0.0)) throw ParameterError("coefficients need eps > 0");
    const PointLocator loc(u.mesh());
    std::vector<CoefficientSample> out;
    out.reserve(pts.size());
    for (const Point2& x : pts) {
        const auto where = loc.locate(x);
        if (!where)
            throw LocationError("point (" + std::to_string(x.x) + ", " + std::to_string(x.y) + ") is outside the mesh");
        const Vec2 gu = u.gradient(static_cast<std::size_t>(where->triangle));
        const double v2 = eps + norm2(gu);
        const double v = std::sqrt(v2);
        const double pv = p(x);
        CoefficientSample s;
        s.point = x;
        s.p = pv;
        s.v_eps = v;
        s.a11 = 1.0 + (pv - 2.0) * gu.x * gu.x / v2;
        s.a12 = (pv - 2.0) * gu.x * gu.y / v2;
        s.a22 = 1.0 + (pv - 2.0) * gu.y * gu.y / v2;
        const double fv = f.value(x);
        s.a_rhs = std::log(v) * dot(gu, p.gradient(x)) + (fv == 0.0 ? 0.0 : fv * std::pow(v, 2.0 - pv));
        out.push_back(s);
    }
    return out;
}

EllipticityResult ellipticity_check(std::span<const CoefficientSample> samples, double p1, double p2, int trials,
                                    std::uint64_t seed)
{
    if (trials < 1) throw ParameterError("ellipticity_check needs trials >= 1");
    const double lower = std::min(p1 - 1.0, 1.0);
    const double upper = std::max(p2 - 1.0, 1.0);
    SplitMix64 rng(seed);
    EllipticityResult r;
    r.min_margin = std::numeric_limits<double>::infinity();
    r.max_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        for (int k = 0; k < trials; ++k) {
            const double t = 2.0 * std::numbers::pi * rng.uniform();
            const double c = std::cos(t);
            const double sn = std::sin(t);
            const double form = s.a11 * c * c + 2.0 * s.a12 * c * sn + s.a22 * sn * sn;
            const double lo = form - lower;
            const double hi = upper - form;
            r.min_margin = std::min(r.min_margin, lo);
            r.max_margin = std::min(r.max_margin, hi);
            if (lo < -1e-10 || hi < -1e-10) ++r.violations;
        }
    }
    r.pass = r.violations == 0;
    return r;
}

std::size_t GridSampling::count_valid() const
{
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v == v; }));
}

GridSampling interior_grid(const ConvexDomain& dom, double h_g)
{
    if (!(h_g > 0.0)) throw ParameterError("lattice spacing must be positive");
    GridSampling g;
    g.h = h_g;
    g.margin = 2.0 * h_g;
    g.i0 = static_cast<int>(std::floor(dom.bbox_min().x / h_g));
    g.j0 = static_cast<int>(std::floor(dom.bbox_min().y / h_g));
    g.nx = static_cast<int>(std::ceil(dom.bbox_max().x / h_g)) - g.i0 + 1;
    g.ny = static_cast<int>(std::ceil(dom.bbox_max().y / h_g)) - g.j0 + 1;
    g.values.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny), nan_v);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Point2 x = g.point(i, j);
            if (dom.contains(x) && dom.distance_to_boundary(x) >= g.margin * (1.0 - 1e-12)) g.at(i, j) = 0.0;
        }
    if (g.count_valid() == 0) throw SamplingError("no lattice point keeps a margin of 2 h_g from the boundary");
    return g;
}

GridSampling difference_quotient(const GridSampling& g, int axis, int order, int sign)
{
    if (axis != 0 && axis != 1) throw ParameterError("axis must be 0 or 1");
    if (sign != 1 && sign != -1) throw ParameterError("step sign must be +1 or -1");
    if (order == 2) return difference_quotient(difference_quotient(g, axis, 1, 1), axis, 1, -1);
    if (order != 1) throw ParameterError("difference quotient order must be 1 or 2");
    if (g.margin < g.h * (1.0 - 1e-12))
        throw SamplingError("lattice margin " + std::to_string(g.margin) + " below the step " + std::to_string(g.h));

    GridSampling out = g;
    out.margin = g.margin - g.h;
    const int di = axis == 0 ? sign : 0;
    const int dj = axis == 1 ? sign : 0;
    const double step = sign * g.h;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int in = i + di;
            const int jn = j + dj;
            if (in < 0 || jn < 0 || in >= g.nx || jn >= g.ny) {
                out.at(i, j) = nan_v;
                continue;
            }
            out.at(i, j) = (g.at(in, jn) - g.at(i, j)) / step;
        }
    return out;
}

std::array<P1Function, 2> recovered_gradient(const P1Function& u)
{
    const TriMesh& mesh = u.mesh();
    std::vector<double> gx(mesh.num_vertices(), 0.0);
    std::vector<double> gy(mesh.num_vertices(), 0.0);
    std::vector<double> mass(mesh.num_vertices(), 0.0);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const Vec2 g = u.gradient(t);
        const double a = mesh.area(t);
        for (int v : mesh.triangles()[t]) {
            const auto k = static_cast<std::size_t>(v);
            gx[k] += a * g.x;
            gy[k] += a * g.y;
            mass[k] += a;
        }
    }
    for (std::size_t k = 0; k < mass.size(); ++k) {
        gx[k] /= mass[k];
        gy[k] /= mass[k];
    }
    return {P1Function(u.mesh_ptr(), std::move(gx)), P1Function(u.mesh_ptr(), std::move(gy))};
}

DqEstimate h2_estimate_dq(const P1Function& u, const ConvexDomain& dom, double h_g)
{
    DqEstimate est;
    if (u.mesh().h() > h_g)
        est.warnings.push_back("mesh size " + std::to_string(u.mesh().h()) + " exceeds the lattice spacing " +
                               std::to_string(h_g) + "; difference quotients resolve element jumps");
    const auto lattice = interior_grid(dom, h_g);
    const auto rec = recovered_gradient(u);
    const PointLocator loc(u.mesh());
    double sum = 0.0;
    std::size_t used = 0;
    std::array<GridSampling, 4> dq;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto comp = sample_grid(lattice, [&](Point2 x) {
            const auto where = loc.locate(x);
            if (!where) throw LocationError("lattice point outside the mesh");
            return rec[c].value(*where);
        });
        dq[2 * c] = difference_quotient(comp, 0, 1);
        dq[2 * c + 1] = difference_quotient(comp, 1, 1);
    }
    for (std::size_t k = 0; k < lattice.values.size(); ++k) {
        double s = 0.0;
        bool ok = true;
        for (const auto& d : dq) {
            const double v = d.values[k];
            if (v != v) {
                ok = false;
                break;
            }
            s += v * v;
        }
        if (!ok) continue;
        sum += s;
        ++used;
    }
    est.value = h_g * std::sqrt(sum);
    est.window_area = static_cast<double>(used) * h_g * h_g;
    return est;
}

double h2_estimate_recovery(const P1Function& u)
{
    const auto rec = recovered_gradient(u);
    const TriMesh& mesh = u.mesh();
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
        s += mesh.area(t) * (norm2(rec[0].gradient(t)) + norm2(rec[1].gradient(t)));
    return std::sqrt(s);
}

double lp_gradient_norm(const P1Function& u, std::span<const double> p_at_points, const QuadratureContext& q)
{
    const auto pts = q.points();
    std::vector<double> g(pts.size());
    std::vector<double> w(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        g[k] = norm(u.gradient(static_cast<std::size_t>(pts[k].triangle)));
        w[k] = pts[k].weight;
    }
    return luxemburg_norm(g, p_at_points, w);
}

double lp_gradient_norm(const P1Function& u, const ExponentField& p, const QuadratureContext& q)
{
    const auto pv = sample(at_points(p), q);
    return lp_gradient_norm(u, pv, q);
}

SetMeasures set_measures(const P1Function& u, std::span<const double> p_at_points, const QuadratureContext& q)
{
    SetMeasures m;
    const auto pts = q.points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (p_at_points[k] == 2.0)
            m.A1 += pts[k].weight;
        else if (p_at_points[k] < 2.0)
            m.A2 += pts[k].weight;
        if (norm2(u.gradient(static_cast<std::size_t>(pts[k].triangle))) > 1.0) m.Omega1 += pts[k].weight;
    }
    return m;
}

double q_tilde(double p, double q)
{
    if (1.0 / q + 1.5 <= p && p < 2.0) return 1.0 / (2.0 * p - 3.0) + 1.0;
    return 0.5 * q + 1.0;
}

double mu_exponent(double qt) { return 2.0 * qt / (qt - 2.0); }

double gamma_exponent(double p, double q) { return mu_exponent(q_tilde(p, q)) * (2.0 - p); }

SplitReport integrability_split_report(const P1Function& u, const ExponentField& p, const ScalarFunction& f,
                                       const ScalarFunction& q_exp, double eps, double s, const QuadratureContext& q)
{
    if (!(eps > 0.0)) throw ParameterError("integrability split needs eps > 0");
    if (!(s > 0.0 && s < 1.0)) throw ParameterError("log-bound exponent s must lie in (0, 1)");
    SplitReport r;
    r.log_bound = 2.0 / (std::numbers::e * s);

    std::vector<double> fa, va, qt, mu, w;
    const auto pts = q.points();
    for (const auto& qp : pts) {
        const double v = std::sqrt(eps + norm2(u.gradient(static_cast<std::size_t>(qp.triangle))));
        if (v > 1.0) r.log_constant = std::max(r.log_constant, std::log(v) / std::pow(v, 0.5 * s));
        const double pv = p(qp.x);
        if (!(pv < 2.0)) continue;
        const double qv = q_exp.value(qp.x);
        if (!(qv > 2.0))
            throw HypothesisError("q = " + std::to_string(qv) + " <= 2 at (" + std::to_string(qp.x.x) + ", " +
                                  std::to_string(qp.x.y) + ") where p < 2");
        const double t = q_tilde(pv, qv);
        const double m = mu_exponent(t);
        const double gm = m * (2.0 - pv);
        if (w.empty()) {
            r.q1 = r.q2 = qv;
            r.q_tilde_min = r.q_tilde_max = t;
            r.mu_min = r.mu_max = m;
            r.gamma_min = r.gamma_max = gm;
        }
        r.q1 = std::min(r.q1, qv);
        r.q2 = std::max(r.q2, qv);
        r.q_tilde_min = std::min(r.q_tilde_min, t);
        r.q_tilde_max = std::max(r.q_tilde_max, t);
        r.mu_min = std::min(r.mu_min, m);
        r.mu_max = std::max(r.mu_max, m);
        r.gamma_min = std::min(r.gamma_min, gm);
        r.gamma_max = std::max(r.gamma_max, gm);
        fa.push_back(f.value(qp.x));
        va.push_back(std::pow(v, 2.0 - pv));
        qt.push_back(t);
        mu.push_back(m);
        w.push_back(qp.weight);
        r.meas_A2 += qp.weight;
    }
    if (w.empty()) return r;

    r.gamma_lower = 1.0 + 2.0 / r.q2;
    r.gamma_upper = std::max(2.0, 2.0 + 8.0 / (r.q1 - 2.0));
    const double tol = 1e-12 * r.gamma_upper;
    r.band_ok = r.gamma_min >= r.gamma_lower - tol && r.gamma_max <= r.gamma_upper + tol;

    double direct2 = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) direct2 += w[k] * fa[k] * fa[k] * va[k] * va[k];
    r.direct = std::sqrt(direct2);
    r.split = luxemburg_norm(fa, qt, w) * luxemburg_norm(va, mu, w);
    r.ratio = r.split > 0.0 ? r.direct / r.split : 0.0;
    r.holder_ok = r.direct <= 2.0 * r.split + 1e-9;
    return r;
}

SplitReport integrability_split_report(const P1Function& u, const ProblemSpec& spec, double eps,
                                       const QuadratureContext& q)
{
    if (!spec.q) throw ParameterError("integrability split needs the exponent q of the source");
    const auto data = effective_data(spec);
    return integrability_split_report(u, data.p, *data.f, *spec.q, eps, spec.s_exponent, q);
}

IdentityCheck curvature_identity_check(const ScalarFieldExpr& u, int n_quad)
{
    if (n_quad < 2) throw ParameterError("curvature identity needs n_quad >= 2");
    const int n_theta = 4 * n_quad;
    for (int k = 0; k < n_theta; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n_theta;
        const double v = u.value({std::cos(t), std::sin(t)});
        if (std::abs(v) > 1e-10)
            throw PreconditionError("u = " + std::to_string(v) + " on the unit circle at angle " + std::to_string(t));
    }
    const auto ux = u.derivative(0);
    const auto uy = u.derivative(1);
    if (!ux || !uy) throw PreconditionError("curvature identity needs closed-form derivatives (no min/max)");
    const auto uxx = ux->derivative(0);
    const auto uxy = ux->derivative(1);
    const auto uyy = uy->derivative(1);

    const auto gl = gauss_legendre(n_quad);
    const double dt = 2.0 * std::numbers::pi / n_theta;
    IdentityCheck r;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double rad = 0.5 * (gl.nodes[i] + 1.0);
        const double wr = 0.5 * gl.weights[i] * rad;
        for (int k = 0; k < n_theta; ++k) {
            const double t = k * dt;
            const Point2 x{rad * std::cos(t), rad * std::sin(t)};
            const double a = uxy->value(x);
            r.lhs += wr * dt * (a * a - uxx->value(x) * uyy->value(x));
        }
    }
    for (int k = 0; k < n_theta; ++k) {
        const double t = k * dt;
        const Point2 x{std::cos(t), std::sin(t)};
        const double dn = ux->value(x) * x.x + uy->value(x) * x.y;
        r.rhs -= 0.5 * dt * dn * dn;
    }
    r.abs_err = std::abs(r.lhs - r.rhs);
    return r;
}

ScalingReport p1_scaling_report(std::span<const double> p1, std::span<const double> h2, double kappa)
{
    if (p1.size() != h2.size()) throw ParameterError("p1 and h2 lists differ in length");
    if (p1.size() < 2) throw ParameterError("scaling fit needs at least two members");
    ScalingReport r;
    r.kappa = kappa;
    r.slope_bound = kappa + 0.5;
    if (p1.size() < 4)
        r.warnings.push_back("only " + std::to_string(p1.size()) + " exponents; at least 4 are recommended");
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < p1.size(); ++k) {
        if (!(p1[k] > 1.0)) throw HypothesisError("p1 = " + std::to_string(p1[k]) + " is not > 1");
        if (!(h2[k] > 0.0)) throw ParameterError("H2 estimate must be positive for a log fit");
        xs.push_back(std::log(1.0 / (p1[k] - 1.0)));
        ys.push_back(std::log(h2[k]));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (sxx == 0.0) {
        r.warnings.push_back("degenerate sweep: all p1 values coincide, slope set to 0");
        r.slope = 0.0;
        r.intercept = my;
        r.pass = false;
        return r;
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.pass = std::isfinite(r.slope) && r.slope <= r.slope_bound;
    return r;
}

}  // namespace plapx
