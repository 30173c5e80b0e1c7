#include "plapx/experiments.hpp"

#include "plapx/error.hpp"

#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#ifndef PLAPX_VERSION
#define PLAPX_VERSION "0.0.0"
#endif

namespace plapx {

namespace {

using nlohmann::json;

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json sidecar_base(const ExperimentConfig& cfg, const std::string& command)
{
    json j;
    j["artifact"] = "plapx";
    j["version"] = PLAPX_VERSION;
    j["command"] = command;
    j["config"] = resolved_config(cfg);
    return j;
}

json to_json(const ScalingReport& s)
{
    return json{{"slope", s.slope},
                {"intercept", s.intercept},
                {"kappa", s.kappa},
                {"slope_bound", s.slope_bound},
                {"pass", s.pass},
                {"warnings", s.warnings}};
}

/// Runs fn(i) for i in [0, n) on thread_count() workers; rethrows the first failure by index.
template <class F>
void parallel_for(std::size_t n, F&& fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
    std::vector<std::exception_ptr> errors(n);
    auto body = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1 || n < 2) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(body, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

const char* eps_header =
    "eps,newton_iterations,final_residual,energy,grad_lp_norm,h2_dq,h2_recovery,meas_A1,meas_A2,meas_Omega1,status\n";

std::string eps_row(const EpsRecord& r)
{
    return num(r.eps) + "," + std::to_string(r.newton_iterations) + "," + num(r.final_residual) + "," +
           num(r.energy) + "," + num(r.grad_lp_norm) + "," + num(r.h2_dq) + "," + num(r.h2_recovery) + "," +
           num(r.meas_A1) + "," + num(r.meas_A2) + "," + num(r.meas_Omega1) + "," +
           (r.used_kacanov ? "ok-kacanov" : "ok") + "\n";
}

std::string csv_field(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ' ';
    return s;
}

json eps_records_json(const SolveReport& rep)
{
    json arr = json::array();
    for (const auto& r : rep.records)
        arr.push_back({{"eps", r.eps}, {"newton_iterations", r.newton_iterations}, {"used_kacanov", r.used_kacanov}});
    return arr;
}

}  // namespace

const char* artifact_version() { return PLAPX_VERSION; }

int thread_count()
{
    const char* s = std::getenv("PLAPX_THREADS");
    if (!s || !*s) return 1;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string("PLAPX_THREADS must be a positive integer, got '") + s + "'");
    return static_cast<int>(std::min(v, 256L));
}

SolveRun run_eps_sweep(const ExperimentConfig& cfg)
{
    const ProblemSpec spec = build_problem(cfg);
    SolveRun run;
    const auto disc = discretize(spec);
    run.report = continuation_solve(spec, disc, true);
    run.out.mesh = disc->mesh_ptr();
    run.out.warnings = run.report.warnings;
    std::string csv = eps_header;
    for (const auto& r : run.report.records) csv += eps_row(r);
    if (run.report.failed()) {
        csv += num(run.report.failed_eps) + ",,,,,,,,,,failed: " + csv_field(run.report.failure) + "\n";
        run.out.failure = run.report.failure;
    }
    run.out.csv = std::move(csv);
    json j = sidecar_base(cfg, "sweep-eps");
    j["warnings"] = run.out.warnings;
    j["records"] = eps_records_json(run.report);
    j["mesh"] = {{"vertices", disc->mesh().num_vertices()}, {"triangles", disc->mesh().num_triangles()},
                 {"h", disc->mesh().h()}};
    if (run.report.failed()) j["failure"] = run.report.failure;
    run.out.sidecar = j.dump(2) + "\n";
    return run;
}

SolveRun run_solve(const ExperimentConfig& cfg)
{
    SolveRun run = run_eps_sweep(cfg);
    std::string csv = eps_header;
    if (run.report.failed())
        csv += num(run.report.failed_eps) + ",,,,,,,,,,failed: " + csv_field(run.report.failure) + "\n";
    else
        csv += eps_row(run.report.final());
    run.out.csv = std::move(csv);
    json j = json::parse(run.out.sidecar);
    j["command"] = "solve";
    run.out.sidecar = j.dump(2) + "\n";
    return run;
}

ConvergenceRun run_convergence(const ExperimentConfig& cfg)
{
    if (!cfg.has("u.exact.expr")) throw ConfigError("convergence study needs u.exact.expr");
    const ProblemSpec spec = build_problem(cfg);
    const auto exact = parse_field_ptr(cfg.get("u.exact.expr"));
    const int levels = spec.refinements;

    std::vector<MeshPtr> meshes;
    {
        TriMesh m = triangulate_convex(spec.domain, spec.mesh_h);
        meshes.push_back(std::make_shared<const TriMesh>(m));
        for (int k = 1; k <= levels; ++k) {
            m = refine_uniform(m);
            meshes.push_back(std::make_shared<const TriMesh>(m));
        }
    }
    ConvergenceRun run;
    run.rows.resize(meshes.size());
    std::vector<std::vector<std::string>> warnings(meshes.size());
    parallel_for(meshes.size(), [&](std::size_t k) {
        ProblemSpec s = spec;
        s.refinements = 0;
        const auto disc = std::make_shared<const Discretization>(meshes[k]);
        const SolveReport rep = continuation_solve(s, disc);
        warnings[k] = rep.warnings;
        const P1Function& u = rep.final().u;
        double l2 = 0.0, h1 = 0.0;
        for (const auto& qp : disc->quadrature().points()) {
            const double e = u.value(qp) - exact->value(qp.x);
            const Vec2 ge = u.gradient(static_cast<std::size_t>(qp.triangle)) - exact->gradient(qp.x);
            l2 += qp.weight * e * e;
            h1 += qp.weight * norm2(ge);
        }
        run.rows[k] = {static_cast<int>(k), meshes[k]->h(), std::sqrt(l2), std::sqrt(h1), nan_v, nan_v};
    });
    for (std::size_t k = 1; k < run.rows.size(); ++k) {
        const double rh = std::log(run.rows[k - 1].h / run.rows[k].h);
        run.rows[k].order_l2 = std::log(run.rows[k - 1].l2_error / run.rows[k].l2_error) / rh;
        run.rows[k].order_h1 = std::log(run.rows[k - 1].h1_error / run.rows[k].h1_error) / rh;
    }
    run.out.warnings = warnings.front();
    run.out.mesh = meshes.back();

    std::string csv = "level,h,L2_error,H1_error,observed_order_L2,observed_order_H1\n";
    for (const auto& r : run.rows)
        csv += std::to_string(r.level) + "," + num(r.h) + "," + num(r.l2_error) + "," + num(r.h1_error) + "," +
               num(r.order_l2) + "," + num(r.order_h1) + "\n";
    run.out.csv = std::move(csv);
    json j = sidecar_base(cfg, "convergence");
    j["warnings"] = run.out.warnings;
    run.out.sidecar = j.dump(2) + "\n";
    return run;
}

P1SweepRun run_p1_sweep(const ExperimentConfig& cfg)
{
    if (!cfg.has("sweep.p1_list")) throw ConfigError("p1 sweep needs sweep.p1_list");
    const auto list = cfg.get_list("sweep.p1_list");
    if (list.empty()) throw ConfigError("sweep.p1_list is empty");
    const ProblemSpec base = build_problem(cfg);
    const auto disc = discretize(base);

    P1SweepRun run;
    run.rows.resize(list.size());
    std::vector<std::vector<std::string>> warnings(list.size());
    parallel_for(list.size(), [&](std::size_t k) {
        ProblemSpec s = base;
        const double shift = list[k] - base.p.p1();
        const FieldPtr fn = base.p.function();
        s.p = ExponentField(make_field([fn, shift](Point2 x) { return fn->value(x) + shift; },
                                       [fn](Point2 x) { return fn->gradient(x); }),
                            list[k], base.p.p2() + shift, base.p.lip());
        P1Row& row = run.rows[k];
        row.p1 = list[k];
        const SolveReport rep = continuation_solve(s, disc, true);
        warnings[k] = rep.warnings;
        if (rep.failed()) {
            row.status = "failed: " + csv_field(rep.failure);
            return;
        }
        row.final = rep.final();
        row.status = row.final.used_kacanov ? "ok-kacanov" : "ok";
        const P1Function& u = row.final.u;
        double l2 = 0.0, g2 = 0.0;
        for (const auto& qp : disc->quadrature().points()) {
            const double v = u.value(qp);
            l2 += qp.weight * v * v;
            g2 += qp.weight * norm2(u.gradient(static_cast<std::size_t>(qp.triangle)));
        }
        row.h2_full = std::sqrt(row.final.h2_recovery * row.final.h2_recovery + l2 + g2);
    });
    run.out.mesh = disc->mesh_ptr();
    for (const auto& w : warnings) run.out.warnings.insert(run.out.warnings.end(), w.begin(), w.end());

    std::string csv = "p1,eps,newton_iterations,final_residual,grad_lp_norm,h2_dq,h2_recovery,h2_full,status\n";
    std::vector<double> p1s, rec, dq, full;
    for (const auto& r : run.rows) {
        if (r.status.rfind("failed", 0) == 0) {
            csv += num(r.p1) + ",,,,,,,," + r.status + "\n";
            if (run.out.failure.empty()) run.out.failure = "p1 = " + num(r.p1) + ": " + r.status;
            continue;
        }
        csv += num(r.p1) + "," + num(r.final.eps) + "," + std::to_string(r.final.newton_iterations) + "," +
               num(r.final.final_residual) + "," + num(r.final.grad_lp_norm) + "," + num(r.final.h2_dq) + "," +
               num(r.final.h2_recovery) + "," + num(r.h2_full) + "," + r.status + "\n";
        p1s.push_back(r.p1);
        rec.push_back(r.final.h2_recovery);
        dq.push_back(r.final.h2_dq);
        full.push_back(r.h2_full);
    }
    json j = sidecar_base(cfg, "sweep-p1");
    if (run.out.ok() && p1s.size() >= 2) {
        run.scaling = p1_scaling_report(p1s, rec);
        run.scaling_dq = p1_scaling_report(p1s, dq);
        run.scaling_full = p1_scaling_report(p1s, full);
        run.out.warnings.insert(run.out.warnings.end(), run.scaling.warnings.begin(), run.scaling.warnings.end());
        j["scaling"] = {{"h2_recovery", to_json(run.scaling)},
                        {"h2_dq", to_json(run.scaling_dq)},
                        {"h2_full", to_json(run.scaling_full)}};
    }
    j["warnings"] = run.out.warnings;
    if (!run.out.ok()) j["failure"] = run.out.failure;
    run.out.csv = std::move(csv);
    run.out.sidecar = j.dump(2) + "\n";
    return run;
}

double window_h1_distance(const P1Function& a, const P1Function& b, Point2 lo, Point2 hi, int samples)
{
    const PointLocator la(a.mesh());
    const PointLocator lb(b.mesh());
    const double dx = (hi.x - lo.x) / samples;
    const double dy = (hi.y - lo.y) / samples;
    // offset keeps sample points off lattice-aligned mesh edges
    const double shift = 1e-6 * std::numbers::pi;
    double s = 0.0;
    for (int j = 0; j < samples; ++j)
        for (int i = 0; i < samples; ++i) {
            const Point2 x{lo.x + (i + 0.5 + shift) * dx, lo.y + (j + 0.5 + shift) * dy};
            const auto pa = la.locate(x);
            const auto pb = lb.locate(x);
            if (!pa || !pb) throw LocationError("window point outside one of the meshes");
            const double e = a.value(*pa) - b.value(*pb);
            const Vec2 g = a.gradient(static_cast<std::size_t>(pa->triangle)) -
                           b.gradient(static_cast<std::size_t>(pb->triangle));
            s += e * e + norm2(g);
        }
    return std::sqrt(s * dx * dy);
}

DomainSweepRun run_domain_sweep(const ExperimentConfig& cfg)
{
    const ProblemSpec base = build_problem(cfg);
    if (base.domain.shape() != DomainShape::Polygon) throw ConfigError("domain sweep needs a polygonal domain");
    const ConvexDomain exact = ConvexDomain::polygon(base.domain.vertices(), 0.0, base.domain.arc_segments());
    std::vector<double> radii;
    if (cfg.has("sweep.radii")) {
        radii = cfg.get_list("sweep.radii");
    } else {
        const double r0 = cfg.get_double("sweep.r0", 0.2 * exact.shortest_edge());
        const int levels = cfg.get_int("sweep.levels", 5);
        for (int m = 0; m < levels; ++m) radii.push_back(r0 / std::pow(2.0, m));
    }
    if (radii.empty()) throw ConfigError("domain sweep needs at least one radius");

    Point2 wlo, whi;
    if (cfg.has("sweep.window")) {
        const auto w = cfg.get_list("sweep.window");
        if (w.size() != 4) throw ConfigError("sweep.window: expected 'x0, y0, x1, y1'");
        wlo = {w[0], w[1]};
        whi = {w[2], w[3]};
    } else {
        const Point2 lo = exact.bbox_min();
        const Point2 hi = exact.bbox_max();
        wlo = {lo.x + 0.25 * (hi.x - lo.x), lo.y + 0.25 * (hi.y - lo.y)};
        whi = {hi.x - 0.25 * (hi.x - lo.x), hi.y - 0.25 * (hi.y - lo.y)};
    }

    DomainSweepRun run;
    const std::size_t n = radii.size();
    run.rows.resize(n);
    std::vector<P1Function> sols(n);
    std::vector<std::vector<std::string>> warnings(n);
    // the difference-quotient lattice is shared by all members
    const double h_g = base.h2_grid_spacing > 0.0 ? base.h2_grid_spacing
                                                  : std::max(base.mesh_h / std::pow(2.0, base.refinements),
                                                             exact.diameter() / 40.0);
    parallel_for(n, [&](std::size_t m) {
        ProblemSpec s = base;
        s.domain = round_corners(exact, radii[m]);
        s.h2_grid_spacing = h_g;
        DomainRow& row = run.rows[m];
        row.m = static_cast<int>(m);
        row.r = radii[m];
        row.area_deficit = exact.area() - s.domain.polyline_area();
        row.area_deficit_exact = exact.area() - s.domain.area();
        row.h1_distance = nan_v;
        const SolveReport rep = continuation_solve(s, discretize(s), true);
        warnings[m] = rep.warnings;
        if (rep.failed()) {
            row.status = "failed: " + csv_field(rep.failure);
            return;
        }
        row.h2_dq = rep.final().h2_dq;
        row.h2_recovery = rep.final().h2_recovery;
        for (const auto& r : rep.records) row.newton_iterations += r.newton_iterations;
        row.status = "ok";
        sols[m] = rep.final().u;
    });
    for (std::size_t m = 1; m < n; ++m)
        if (run.rows[m].status == "ok" && run.rows[m - 1].status == "ok")
            run.rows[m].h1_distance = window_h1_distance(sols[m], sols[m - 1], wlo, whi);
    for (const auto& w : warnings) run.out.warnings.insert(run.out.warnings.end(), w.begin(), w.end());
    if (sols.back().mesh_ptr()) run.out.mesh = sols.back().mesh_ptr();

    std::string csv = "m,r,area_deficit,area_deficit_exact,h2_dq,h2_recovery,h1_distance,newton_iterations,status\n";
    for (const auto& r : run.rows) {
        if (r.status != "ok" && run.out.failure.empty()) run.out.failure = "r = " + num(r.r) + ": " + r.status;
        csv += std::to_string(r.m) + "," + num(r.r) + "," + num(r.area_deficit) + "," + num(r.area_deficit_exact) +
               "," + num(r.h2_dq) + "," + num(r.h2_recovery) + "," + num(r.h1_distance) + "," +
               std::to_string(r.newton_iterations) + "," + r.status + "\n";
    }
    run.out.csv = std::move(csv);
    json j = sidecar_base(cfg, "sweep-domain");
    j["window"] = {wlo.x, wlo.y, whi.x, whi.y};
    j["h2_grid_spacing"] = h_g;
    j["warnings"] = run.out.warnings;
    if (!run.out.ok()) j["failure"] = run.out.failure;
    run.out.sidecar = j.dump(2) + "\n";
    return run;
}

IdentityRun run_identity_check(const ExperimentConfig& cfg)
{
    std::vector<std::string> exprs;
    if (cfg.has("identity.functions")) {
        std::istringstream is(cfg.get("identity.functions"));
        std::string item;
        while (std::getline(is, item, ';')) {
            const auto b = item.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            const auto e = item.find_last_not_of(" \t");
            exprs.push_back(item.substr(b, e - b + 1));
        }
    } else {
        exprs = {"1 - x^2 - y^2", "(1 - x^2 - y^2)*x", "(1 - x^2 - y^2)*sin(x + 2*y)"};
    }
    if (exprs.empty()) throw ConfigError("identity.functions is empty");
    const int n_quad = cfg.get_int("identity.n_quad", 48);

    IdentityRun run;
    std::string csv = "function,lhs,rhs,abs_err\n";
    json j = sidecar_base(cfg, "check-identity");
    json cases = json::array();
    for (const auto& e : exprs) {
        const auto u = parse_field(e);
        IdentityRow row{e, curvature_identity_check(u, n_quad)};
        csv += "\"" + e + "\"," + num(row.check.lhs) + "," + num(row.check.rhs) + "," + num(row.check.abs_err) + "\n";
        cases.push_back({{"function", e}, {"lhs", row.check.lhs}, {"rhs", row.check.rhs}, {"abs_err", row.check.abs_err}});
        run.rows.push_back(std::move(row));
    }
    j["cases"] = cases;
    run.out.csv = std::move(csv);
    run.out.sidecar = j.dump(2) + "\n";
    return run;
}

void write_outputs(const ExperimentConfig& cfg, const RunOutput& out)
{
    if (!cfg.has("output.path")) return;
    const std::string path = cfg.get("output.path");
    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + path);
    csv << out.csv;
    std::ofstream side(path + ".json", std::ios::binary);
    if (!side) throw ConfigError("cannot write " + path + ".json");
    side << out.sidecar;
}

}  // namespace plapx
