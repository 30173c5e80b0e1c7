#include "plapx/varexp.hpp"

#include "plapx/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace plapx {

namespace {

std::string point_str(Point2 x)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", x.x, x.y);
    return buf;
}

}  // namespace

ExponentField::ExponentField(FieldPtr fn, double p1, double p2, double lip)
    : fn_(std::move(fn)), p1_(p1), p2_(p2), lip_(lip)
{
    if (!fn_) throw ParameterError("exponent field needs a function");
    if (!std::isfinite(p1) || !std::isfinite(p2) || !(p1 > 0.0) || p1 > p2)
        throw ParameterError("exponent bounds must satisfy 0 < p1 <= p2 < inf");
    if (!std::isfinite(lip) || lip < 0.0) throw ParameterError("Lipschitz estimate must be finite and >= 0");
}

ExponentField ExponentField::constant(double c) { return ExponentField(constant_field(c), c, c, 0.0); }

ExponentField ExponentField::sampled(FieldPtr fn, const ConvexDomain& dom, int min_samples)
{
    const Point2 lo = dom.bbox_min();
    const Point2 hi = dom.bbox_max();
    const double box = (hi.x - lo.x) * (hi.y - lo.y);
    const double fill = std::max(dom.polyline_area() / box, 1e-3);
    const int n = static_cast<int>(std::ceil(std::sqrt(min_samples / fill))) + 1;
    const double hx = (hi.x - lo.x) / (n - 1);
    const double hy = (hi.y - lo.y) / (n - 1);

    std::vector<double> val(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                            std::numeric_limits<double>::quiet_NaN());
    double p1 = std::numeric_limits<double>::infinity();
    double p2 = -p1;
    double lip = 0.0;
    auto visit = [&](Point2 x) {
        const double v = fn->value(x);
        if (!std::isfinite(v)) throw EvaluationError("exponent is not finite at " + point_str(x));
        p1 = std::min(p1, v);
        p2 = std::max(p2, v);
        lip = std::max(lip, norm(fn->gradient(x)));
        return v;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 x{lo.x + i * hx, lo.y + j * hy};
            if (dom.contains(x, 1e-12)) val[static_cast<std::size_t>(j * n + i)] = visit(x);
        }
    for (const auto& v : dom.boundary_polyline()) visit(v);

    // neighbour quotients catch slopes the pointwise gradients miss
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double a = val[static_cast<std::size_t>(j * n + i)];
            if (std::isnan(a)) continue;
            if (i + 1 < n) {
                const double b = val[static_cast<std::size_t>(j * n + i + 1)];
                if (!std::isnan(b)) lip = std::max(lip, std::abs(b - a) / hx);
            }
            if (j + 1 < n) {
                const double b = val[static_cast<std::size_t>((j + 1) * n + i)];
                if (!std::isnan(b)) lip = std::max(lip, std::abs(b - a) / hy);
            }
        }
    if (p1 == p2) lip = 0.0;
    return ExponentField(std::move(fn), p1, p2, 1.01 * lip);
}

QuadField at_points(FieldPtr f)
{
    return [f = std::move(f)](const QuadPoint& qp) { return f->value(qp.x); };
}

QuadField at_points(const ExponentField& p) { return at_points(p.function()); }

std::vector<double> sample(const QuadField& u, const QuadratureContext& q)
{
    std::vector<double> out(q.size());
    const auto pts = q.points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        out[k] = u(pts[k]);
        if (!std::isfinite(out[k]))
            throw EvaluationError("non-finite value at quadrature point " + point_str(pts[k].x) + " of triangle " +
                                  std::to_string(pts[k].triangle));
    }
    return out;
}

namespace {

std::vector<double> weights_of(const QuadratureContext& q)
{
    std::vector<double> w(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) w[k] = q.points()[k].weight;
    return w;
}

double scaled_modular(std::span<const double> u, std::span<const double> p, std::span<const double> w, double k)
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]) / k;
        if (a != 0.0) s += w[i] * std::pow(a, p[i]);
    }
    return s;
}

}  // namespace

double modular(std::span<const double> u, std::span<const double> p, std::span<const double> w)
{
    if (u.size() != p.size() || u.size() != w.size()) throw ParameterError("modular: size mismatch");
    return scaled_modular(u, p, w, 1.0);
}

double modular(const QuadField& u, const ExponentField& p, const QuadratureContext& q)
{
    const auto uv = sample(u, q);
    const auto pv = sample(at_points(p), q);
    return modular(uv, pv, weights_of(q));
}

double luxemburg_norm(std::span<const double> u, std::span<const double> p, std::span<const double> w)
{
    if (u.size() != p.size() || u.size() != w.size()) throw ParameterError("luxemburg_norm: size mismatch");
    double l1 = 0.0;
    double measure = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        l1 += w[i] * std::abs(u[i]);
        measure += w[i];
    }
    if (l1 == 0.0) return 0.0;

    double lo = l1 / (1.0 + measure);
    double hi = 1.0;
    int doublings = 0;
    while (!(scaled_modular(u, p, w, hi) < 1.0)) {
        hi *= 2.0;
        if (++doublings > 200) throw NonconvergenceError("luxemburg_norm: bracket expansion failed");
    }
    // the lower end may sit above 1 when u is tiny; shrink until rho(u/lo) >= 1
    while (scaled_modular(u, p, w, lo) < 1.0) {
        lo *= 0.5;
        if (++doublings > 400) throw NonconvergenceError("luxemburg_norm: bracket expansion failed");
    }
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-12; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (scaled_modular(u, p, w, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

double luxemburg_norm(const QuadField& u, const ExponentField& p, const QuadratureContext& q)
{
    const auto uv = sample(u, q);
    const auto pv = sample(at_points(p), q);
    return luxemburg_norm(uv, pv, weights_of(q));
}

HolderCheck holder_check(const QuadField& f, const QuadField& g, const ExponentField& p, const ExponentField& q_exp,
                         const ExponentField& s, const QuadratureContext& q)
{
    const auto pv = sample(at_points(p), q);
    const auto qv = sample(at_points(q_exp), q);
    const auto sv = sample(at_points(s), q);
    double worst = 0.0;
    std::size_t worst_k = 0;
    for (std::size_t k = 0; k < pv.size(); ++k) {
        const double gap = std::abs(1.0 / pv[k] + 1.0 / qv[k] - 1.0 / sv[k]);
        if (gap > worst) {
            worst = gap;
            worst_k = k;
        }
    }
    if (worst > 1e-12)
        throw PreconditionError("1/p + 1/q != 1/s: mismatch " + std::to_string(worst) + " at " +
                                point_str(q.points()[worst_k].x));

    const auto fv = sample(f, q);
    const auto gv = sample(g, q);
    std::vector<double> fg(fv.size());
    for (std::size_t k = 0; k < fv.size(); ++k) fg[k] = fv[k] * gv[k];
    const auto w = weights_of(q);

    HolderCheck r;
    r.lhs = luxemburg_norm(fg, sv, w);
    r.rhs = 2.0 * luxemburg_norm(fv, pv, w) * luxemburg_norm(gv, qv, w);
    r.satisfied = r.lhs <= r.rhs + 1e-9;
    return r;
}

double log_holder_modulus(const ExponentField& p, std::span<const PointPair> pairs)
{
    double m = 0.0;
    for (const auto& [x, y] : pairs) {
        const double d = norm(x - y);
        if (d == 0.0) continue;
        m = std::max(m, std::abs(p(x) - p(y)) * std::log(std::numbers::e + 1.0 / d));
    }
    return m;
}

std::vector<PointPair> grid_pairs(const ConvexDomain& dom, int n)
{
    const Point2 lo = dom.bbox_min();
    const Point2 hi = dom.bbox_max();
    std::vector<Point2> pts;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 x{lo.x + (hi.x - lo.x) * i / (n - 1), lo.y + (hi.y - lo.y) * j / (n - 1)};
            if (dom.contains(x, 1e-12)) pts.push_back(x);
        }
    std::vector<PointPair> out;
    out.reserve(pts.size() * (pts.size() - 1) / 2);
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) out.emplace_back(pts[a], pts[b]);
    return out;
}

namespace {

class MollifiedField final : public ScalarFunction {
public:
    MollifiedField(FieldPtr base, double delta, const ConvexDomain& dom) : base_(std::move(base)), dom_(dom)
    {
        // radial bump exp(-1/(1-r^2)) on the unit disk: Gauss-Legendre in r, uniform in angle
        const auto gl = gauss_legendre(8);
        constexpr int n_theta = 16;
        double total = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double r = 0.5 * (gl.nodes[i] + 1.0);
            const double w = 0.5 * gl.weights[i] * r * std::exp(-1.0 / (1.0 - r * r));
            for (int k = 0; k < n_theta; ++k) {
                const double t = 2.0 * std::numbers::pi * (k + 0.5 * static_cast<double>(i % 2)) / n_theta;
                offsets_.push_back({delta * r * std::cos(t), delta * r * std::sin(t)});
                weights_.push_back(w);
                total += w;
            }
        }
        for (auto& w : weights_) w /= total;
    }

    [[nodiscard]] double value(Point2 x) const override
    {
        double s = 0.0;
        for (std::size_t k = 0; k < offsets_.size(); ++k) s += weights_[k] * base_->value(dom_.project(x - offsets_[k]));
        return s;
    }

private:
    FieldPtr base_;
    ConvexDomain dom_;
    std::vector<Vec2> offsets_;
    std::vector<double> weights_;
};

}  // namespace

ExponentField mollify_exponent(const ExponentField& p, double delta, const ConvexDomain& dom)
{
    if (!(delta > 0.0)) throw ParameterError("mollification scale must be positive");
    if (p.is_constant()) return p;
    // kernel weights are positive and sum to one, so bounds and Lipschitz constant carry over
    return ExponentField(std::make_shared<MollifiedField>(p.function(), delta, dom), p.p1(), p.p2(), p.lip());
}

}  // namespace plapx
