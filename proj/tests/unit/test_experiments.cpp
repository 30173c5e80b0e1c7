#include "doctest.h"

#include "plapx/config.hpp"
#include "plapx/error.hpp"
#include "plapx/experiments.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>

using namespace plapx;

namespace {

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("config parsing")
{
    const auto cfg = ExperimentConfig::parse(R"(
# comment
p.expr = 1.5 + 0.5*y   # trailing comment
f.expr = 1
g.expr = 0
mesh.h = 0.2
domain.vertices = 0,0; 2,0; 2,1; 0,1
seed = 42
)");
    CHECK(cfg.get("p.expr") == "1.5 + 0.5*y");
    CHECK(cfg.get_double("mesh.h") == 0.2);
    CHECK(cfg.get_seed() == 42);
    CHECK(build_domain(cfg).polyline_area() == doctest::Approx(2.0));
    const auto spec = build_problem(cfg);
    CHECK(spec.p.p1() == doctest::Approx(1.5));
    CHECK(spec.p.p2() == doctest::Approx(2.0));

    try {
        (void)ExperimentConfig::parse("p.expr = 2\nfoo.bar = 1\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("foo.bar") != std::string::npos);
    }
    CHECK_THROWS_AS((void)ExperimentConfig::parse("mesh.h = 1\nmesh.h = 2\n"), ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::parse("mesh.h 1\n"), ConfigError);
    try {
        (void)build_problem(ExperimentConfig::parse("p.expr = 2\nf.expr = 0\nmesh.h = 0.1\n"));
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("g.expr") != std::string::npos);
    }
    CHECK_THROWS_AS((void)build_problem(ExperimentConfig::parse("p.expr = 2\nf.expr = 0\ng.expr = 0\nmesh.h = -1\n")),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::parse("mesh.h = abc\n").get_double("mesh.h"), ConfigError);

    const auto disk = ExperimentConfig::parse("domain.shape = disk\ndomain.radius = 2\ndomain.segments = 32\n");
    CHECK(build_domain(disk).shape() == DomainShape::Disk);
    CHECK(build_domain(disk).radius() == 2.0);

    const auto resolved = resolved_config(cfg);
    CHECK(resolved.at("eps.stop") != "");
    CHECK(resolved.at("p.expr") == "1.5 + 0.5*y");
}

TEST_CASE("convergence study on the linear benchmark")
{
    const auto cfg = ExperimentConfig::parse(R"(
p.expr = 2
f.expr = 2*pi^2*sin(pi*x)*sin(pi*y)
g.expr = 0
u.exact.expr = sin(pi*x)*sin(pi*y)
mesh.h = 0.25
mesh.refinements = 3
eps.start = 1
eps.stop = 1
)");
    const auto run = run_convergence(cfg);
    REQUIRE(run.rows.size() == 4);
    for (std::size_t k = 1; k < run.rows.size(); ++k) {
        CHECK(run.rows[k].level == run.rows[k - 1].level + 1);
        CHECK(run.rows[k].h == doctest::Approx(run.rows[k - 1].h / 2).epsilon(1e-12));
        CHECK(run.rows[k].l2_error < run.rows[k - 1].l2_error);
    }
    CHECK(std::isnan(run.rows[0].order_l2));
    CHECK(run.rows.back().order_l2 > 1.8);
    CHECK(run.rows.back().order_h1 > 0.9);
    CHECK(first_line(run.out.csv) == "level,h,L2_error,H1_error,observed_order_L2,observed_order_H1");

    CHECK_THROWS_AS((void)run_convergence(ExperimentConfig::parse("p.expr = 2\nf.expr = 0\ng.expr = 0\nmesh.h = 0.2\n")),
                    ConfigError);
}

TEST_CASE("eps sweep output")
{
    const auto cfg = ExperimentConfig::parse(R"(
p.expr = 2
f.expr = 1
g.expr = 0
mesh.h = 0.1
eps.stop = 1e-3
)");
    const auto run = run_eps_sweep(cfg);
    CHECK(run.out.ok());
    CHECK(first_line(run.out.csv) ==
          "eps,newton_iterations,final_residual,energy,grad_lp_norm,h2_dq,h2_recovery,meas_A1,meas_A2,meas_Omega1,status");
    CHECK(count_lines(run.out.csv) == run.report.records.size() + 1);
    for (std::size_t k = 1; k < run.report.records.size(); ++k) {
        CHECK(run.report.records[k].eps < run.report.records[k - 1].eps);
        CHECK(std::abs(run.report.records[k].h2_dq - run.report.records[0].h2_dq) <= 1e-10);
        CHECK(std::abs(run.report.records[k].h2_recovery - run.report.records[0].h2_recovery) <= 1e-10);
    }

    const auto side = nlohmann::json::parse(run.out.sidecar);
    CHECK(side.at("version") == artifact_version());
    CHECK(side.at("config").at("f.expr") == "1");
    CHECK(side.at("config").contains("eps.factor"));

    const auto single = run_solve(cfg);
    CHECK(count_lines(single.out.csv) == 2);
}

TEST_CASE("failed solves become rows")
{
    const auto cfg = ExperimentConfig::parse(R"(
p.expr = 1.2
f.expr = 10
g.expr = 0
mesh.h = 0.1
eps.start = 1e-2
eps.stop = 1e-6
newton.max_iter = 1
newton.kacanov = 0
newton.tol = 1e-15
)");
    const auto run = run_eps_sweep(cfg);
    CHECK_FALSE(run.out.ok());
    const auto last = run.out.csv.substr(run.out.csv.rfind('\n', run.out.csv.size() - 2) + 1);
    CHECK(last.find("failed") != std::string::npos);
}

TEST_CASE("p1 sweep")
{
    CHECK_THROWS_AS((void)run_p1_sweep(ExperimentConfig::parse("p.expr = 2\nf.expr = 1\ng.expr = 0\nmesh.h = 0.2\n")),
                    ConfigError);
    CHECK_THROWS_AS((void)run_p1_sweep(ExperimentConfig::parse(
                        "p.expr = 2\nf.expr = 1\ng.expr = 0\nmesh.h = 0.2\nsweep.p1_list =\n")),
                    ConfigError);

    const auto cfg = ExperimentConfig::parse(R"(
p.expr = 1.5
f.expr = 1
g.expr = x + y^2
mesh.h = 0.1
eps.stop = 1e-4
sweep.p1_list = 1.5, 1.25, 1.1
)");
    const auto run = run_p1_sweep(cfg);
    REQUIRE(run.rows.size() == 3);
    CHECK(std::isfinite(run.scaling.slope));
    CHECK_FALSE(run.scaling.warnings.empty());  // fewer than four members
    for (const auto& r : run.rows) CHECK(r.status.rfind("ok", 0) == 0);
    CHECK(first_line(run.out.csv) ==
          "p1,eps,newton_iterations,final_residual,grad_lp_norm,h2_dq,h2_recovery,h2_full,status");

    // injected synthetic data
    const std::vector<double> p1 = {1.5, 1.25, 1.1, 1.05};
    std::vector<double> h2;
    for (double p : p1) h2.push_back(std::pow(p - 1, -2.0));
    CHECK(std::abs(p1_scaling_report(p1, h2).slope - 2.0) <= 1e-12);
}

TEST_CASE("domain sweep")
{
    const auto cfg = ExperimentConfig::parse(R"(
p.expr = 1.5 + 0.5*y
f.expr = 1
g.expr = 0
mesh.h = 0.1
eps.stop = 1e-3
sweep.r0 = 0.2
sweep.levels = 3
)");
    const auto run = run_domain_sweep(cfg);
    REQUIRE(run.rows.size() == 3);
    for (std::size_t k = 0; k < run.rows.size(); ++k) {
        const auto& r = run.rows[k];
        CHECK(r.r == doctest::Approx(0.2 / std::pow(2.0, static_cast<double>(k))));
        CHECK(r.area_deficit_exact == doctest::Approx((4 - std::numbers::pi) * r.r * r.r).epsilon(1e-12));
        CHECK(std::abs(r.area_deficit - r.area_deficit_exact) <= 0.01 * r.r * r.r);
        CHECK(r.status.rfind("ok", 0) == 0);
    }
    CHECK(std::isnan(run.rows[0].h1_distance));
    CHECK(run.rows[2].h1_distance < run.rows[1].h1_distance);
}

TEST_CASE("identity check defaults")
{
    const auto run = run_identity_check(ExperimentConfig::parse(""));
    REQUIRE(run.rows.size() == 3);
    CHECK(std::abs(run.rows[0].check.lhs + 4 * std::numbers::pi) <= 1e-8);
    for (const auto& r : run.rows) CHECK(r.check.abs_err <= 1e-6);
    CHECK(first_line(run.out.csv) == "function,lhs,rhs,abs_err");
}

TEST_CASE("outputs are deterministic")
{
    const auto cfg = ExperimentConfig::parse(R"(
p.expr = 1.5 + 0.5*x*y
f.expr = 1
g.expr = 0
mesh.h = 0.1
eps.stop = 1e-2
sweep.p1_list = 1.5, 1.3
)");
    CHECK(run_eps_sweep(cfg).out.csv == run_eps_sweep(cfg).out.csv);
    const auto a = run_p1_sweep(cfg).out.csv;
    ::setenv("PLAPX_THREADS", "2", 1);
    CHECK(thread_count() == 2);
    const auto b = run_p1_sweep(cfg).out.csv;
    ::setenv("PLAPX_THREADS", "zero", 1);
    CHECK_THROWS_AS((void)thread_count(), ConfigError);
    ::unsetenv("PLAPX_THREADS");
    CHECK(thread_count() == 1);
    CHECK(a == b);
}

TEST_CASE("window H1 distance")
{
    const auto m = std::make_shared<const TriMesh>(triangulate_convex(ConvexDomain::unit_square(), 0.1));
    const auto a = P1Function::interpolate(m, *parse_field_ptr("x"));
    const auto b = P1Function::interpolate(m, *parse_field_ptr("x + 0.5"));
    // |a - b| = 0.5 on a window of area 1/4, no gradient difference
    CHECK(window_h1_distance(a, b, {0.25, 0.25}, {0.75, 0.75}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(window_h1_distance(a, a, {0.25, 0.25}, {0.75, 0.75}) == 0.0);
}
