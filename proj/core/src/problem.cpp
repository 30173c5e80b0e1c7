#include "plapx/problem.hpp"

#include "plapx/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace plapx {

void ProblemSpec::check() const
{
    if (!f || !g) throw ParameterError("problem needs source f and boundary data g");
    if (!(eps_stop > 0.0 && eps_stop <= eps_start && eps_start <= 1.0))
        throw ParameterError("eps schedule needs 0 < eps.stop <= eps.start <= 1");
    if (!(eps_factor > 0.0 && eps_factor < 1.0)) throw ParameterError("eps.factor must lie in (0, 1)");
    if (!(mesh_h > 0.0)) throw ParameterError("mesh.h must be positive");
    if (refinements < 0) throw ParameterError("mesh.refinements must be >= 0");
    if (!(newton_tol > 0.0)) throw ParameterError("newton.tol must be positive");
    if (newton_max_iter < 1) throw ParameterError("newton.max_iter must be >= 1");
    if (!(s_exponent > 0.0 && s_exponent < 1.0)) throw ParameterError("s.exponent must lie in (0, 1)");
    if (mollify_delta < 0.0) throw ParameterError("mollify.delta must be >= 0");
    if (h2_grid_spacing < 0.0) throw ParameterError("h2.grid_spacing must be >= 0");
}

std::vector<double> ProblemSpec::eps_schedule() const
{
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double e = eps_start * std::pow(eps_factor, k);
        if (e <= eps_stop * (1.0 + 1e-9)) break;
        out.push_back(e);
    }
    out.push_back(eps_stop);
    return out;
}

Discretization::Discretization(MeshPtr mesh)
    : mesh_(std::move(mesh)), quad_(std::make_unique<QuadratureContext>(*mesh_)), dofs_(*mesh_)
{
}

std::shared_ptr<const Discretization> discretize(const ProblemSpec& spec)
{
    TriMesh m = triangulate_convex(spec.domain, spec.mesh_h);
    for (int k = 0; k < spec.refinements; ++k) m = refine_uniform(m);
    return std::make_shared<const Discretization>(std::make_shared<const TriMesh>(std::move(m)));
}

FieldPtr masked_source(FieldPtr f, const ExponentField& p_eps)
{
    return make_field([f = std::move(f), p = p_eps](Point2 x) { return p(x) <= 2.0 ? f->value(x) : 0.0; });
}

EffectiveData effective_data(const ProblemSpec& spec)
{
    if (spec.mollify_delta > 0.0) {
        ExponentField pe = mollify_exponent(spec.p, spec.mollify_delta, spec.domain);
        return {pe, masked_source(spec.f, pe)};
    }
    return {spec.p, spec.f};
}

std::vector<std::string> validate_spec(const ProblemSpec& spec)
{
    if (!(spec.p.p1() > 1.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "p1 = %.6g violates the hypothesis p1 > 1", spec.p.p1());
        throw HypothesisError(buf);
    }
    std::vector<std::string> warnings;
    const Point2 lo = spec.domain.bbox_min();
    const Point2 hi = spec.domain.bbox_max();
    constexpr int n = 101;
    bool f2 = false;
    bool f1 = false;
    Point2 f2_at{}, f1_at{};
    for (int j = 0; j < n && !(f1 && f2); ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 x{lo.x + (hi.x - lo.x) * i / (n - 1), lo.y + (hi.y - lo.y) * j / (n - 1)};
            if (!spec.domain.contains(x, 1e-12)) continue;
            const double pv = spec.p(x);
            if (!f2 && pv > 2.0 && std::abs(spec.f->value(x)) > 1e-14) {
                f2 = true;
                f2_at = x;
            }
            if (!f1 && spec.q && pv <= 2.0 && spec.q->value(x) <= 2.0) {
                f1 = true;
                f1_at = x;
            }
        }
    char buf[192];
    if (f2) {
        std::snprintf(buf, sizeof buf, "F2: f is nonzero where p > 2, e.g. at (%.6g, %.6g); H2 theory not guaranteed",
                      f2_at.x, f2_at.y);
        warnings.emplace_back(buf);
    }
    if (f1) {
        std::snprintf(buf, sizeof buf, "F1: q <= 2 where p <= 2, e.g. at (%.6g, %.6g)", f1_at.x, f1_at.y);
        warnings.emplace_back(buf);
    }
    return warnings;
}

}  // namespace plapx
