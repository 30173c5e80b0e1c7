#include "plapx/config.hpp"
#include "plapx/error.hpp"
#include "plapx/experiments.hpp"
#include "plapx/mesh.hpp"
#include "plapx/problem.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

using namespace plapx;

namespace {

struct Options {
    std::string config;
    std::string mesh_out;
    std::string output;
    bool strict = false;
};

// 0 ok, 1 failure, 2 warnings under --strict
int finish(const Options& opt, const ExperimentConfig& cfg, const RunOutput& out)
{
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (!opt.mesh_out.empty()) {
        if (out.mesh)
            write_mesh(*out.mesh, opt.mesh_out);
        else
            std::cerr << "warning: this command builds no mesh; --mesh-out ignored\n";
    }
    if (cfg.has("output.path")) {
        write_outputs(cfg, out);
        std::cerr << "wrote " << cfg.get("output.path") << " and " << cfg.get("output.path") << ".json\n";
    } else {
        std::cout << out.csv;
    }
    if (!out.ok()) {
        std::cerr << "error: " << out.failure << "\n";
        return 1;
    }
    if (opt.strict && !out.warnings.empty()) return 2;
    return 0;
}

int validate(const Options& opt, const ExperimentConfig& cfg)
{
    const ProblemSpec spec = build_problem(cfg);
    spec.check();
    RunOutput out;
    out.warnings = validate_spec(spec);
    out.mesh = discretize(spec)->mesh_ptr();
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (!opt.mesh_out.empty()) write_mesh(*out.mesh, opt.mesh_out);
    std::cout << "p in [" << spec.p.p1() << ", " << spec.p.p2() << "], lip " << spec.p.lip() << "; mesh "
              << out.mesh->num_vertices() << " vertices, " << out.mesh->num_triangles() << " triangles, h "
              << out.mesh->h() << "; " << spec.eps_schedule().size() << " eps levels\n";
    std::cout << (out.warnings.empty() ? "valid\n" : "valid with warnings\n");
    return opt.strict && !out.warnings.empty() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"plapx: Dirichlet p(x)-Laplacian solver and H2-regularity diagnostics"};
    app.require_subcommand(1);
    Options opt;

    using Runner = std::function<RunOutput(const ExperimentConfig&)>;
    const std::vector<std::tuple<const char*, const char*, Runner>> commands = {
        {"solve", "eps continuation; prints the final record", [](const auto& c) { return run_solve(c).out; }},
        {"sweep-eps", "one row per eps of the continuation", [](const auto& c) { return run_eps_sweep(c).out; }},
        {"sweep-p1", "final-eps H2 estimates over sweep.p1_list and the scaling fit",
         [](const auto& c) { return run_p1_sweep(c).out; }},
        {"sweep-domain", "solutions on corner-rounded approximants", [](const auto& c) { return run_domain_sweep(c).out; }},
        {"convergence", "errors against u.exact.expr under uniform refinement",
         [](const auto& c) { return run_convergence(c).out; }},
        {"check-identity", "curvature identity on the unit disk", [](const auto& c) { return run_identity_check(c).out; }},
    };

    std::vector<std::pair<CLI::App*, Runner>> subs;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opt.config, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--mesh-out", opt.mesh_out, "write the mesh of the (last) solve");
        sub->add_option("-o,--output", opt.output, "override output.path");
        sub->add_flag("--strict", opt.strict, "exit with status 2 when warnings were emitted");
    };
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        subs.emplace_back(sub, fn);
    }
    auto* val = app.add_subcommand("validate", "check the config and the data hypotheses");
    add_common(val);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // usage errors count as failures; --help stays 0
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig cfg = ExperimentConfig::load(opt.config);
        if (!opt.output.empty()) cfg.set("output.path", opt.output);
        if (val->parsed()) return validate(opt, cfg);
        for (const auto& [sub, fn] : subs)
            if (sub->parsed()) return finish(opt, cfg, fn(cfg));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
