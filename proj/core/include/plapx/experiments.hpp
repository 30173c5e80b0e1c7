#pragma once

#include "plapx/assembly.hpp"
#include "plapx/config.hpp"
#include "plapx/regularity.hpp"
#include "plapx/solver.hpp"

#include <string>
#include <vector>

namespace plapx {

/// Text products of a run. The CSV is byte-identical for identical configs; the JSON sidecar
/// records the resolved config, the artifact version and run-specific summaries.
struct RunOutput {
    std::string csv;
    std::string sidecar;
    std::vector<std::string> warnings;
    std::string failure;  ///< empty on success
    MeshPtr mesh;         ///< mesh of the (last) solve, for --mesh-out

    [[nodiscard]] bool ok() const { return failure.empty(); }
};

[[nodiscard]] const char* artifact_version();

/// Worker count from PLAPX_THREADS (default 1).
[[nodiscard]] int thread_count();

struct SolveRun {
    SolveReport report;
    RunOutput out;
};
/// Continuation solve; one CSV row for the final eps.
[[nodiscard]] SolveRun run_solve(const ExperimentConfig& cfg);

/// Columns eps, newton_iterations, final_residual, energy, grad_lp_norm, h2_dq, h2_recovery,
/// meas_A1, meas_A2, meas_Omega1, status. A failed solve ends the table with a row whose
/// status carries the reason.
[[nodiscard]] SolveRun run_eps_sweep(const ExperimentConfig& cfg);

struct ConvergenceRow {
    int level = 0;
    double h = 0.0;
    double l2_error = 0.0;
    double h1_error = 0.0;  ///< gradient L2 error
    double order_l2 = 0.0;  ///< NaN on the first level
    double order_h1 = 0.0;
};
struct ConvergenceRun {
    std::vector<ConvergenceRow> rows;
    RunOutput out;
};
/// Levels 0..mesh.refinements of uniform refinement against u.exact.expr.
[[nodiscard]] ConvergenceRun run_convergence(const ExperimentConfig& cfg);

struct P1Row {
    double p1 = 0.0;
    EpsRecord final;
    double h2_full = 0.0;  ///< (recovery seminorm^2 + ||u||_{H1}^2)^(1/2)
    std::string status;
};
struct P1SweepRun {
    std::vector<P1Row> rows;
    ScalingReport scaling;       ///< fit of h2_recovery
    ScalingReport scaling_dq;    ///< fit of h2_dq
    ScalingReport scaling_full;  ///< fit of h2_full
    RunOutput out;
};
/// Members use p + (p1_k - p1), so each has infimum p1_k and the shape of p.
[[nodiscard]] P1SweepRun run_p1_sweep(const ExperimentConfig& cfg);

struct DomainRow {
    int m = 0;
    double r = 0.0;
    double area_deficit = 0.0;        ///< |Omega| minus the polyline area of Omega_m
    double area_deficit_exact = 0.0;  ///< |Omega| minus the area with exact arcs
    double h2_dq = 0.0;
    double h2_recovery = 0.0;
    double h1_distance = 0.0;  ///< to the previous member on the window; NaN for m = 0
    int newton_iterations = 0;
    std::string status;
};
struct DomainSweepRun {
    std::vector<DomainRow> rows;
    RunOutput out;
};
/// Omega_m = round_corners(domain, r_m), r_m from sweep.radii or sweep.r0 halved sweep.levels times.
[[nodiscard]] DomainSweepRun run_domain_sweep(const ExperimentConfig& cfg);

/// H1 distance of two P1 functions over an axis-aligned window, by midpoint sampling.
[[nodiscard]] double window_h1_distance(const P1Function& a, const P1Function& b, Point2 lo, Point2 hi,
                                        int samples = 256);

struct IdentityRow {
    std::string expr;
    IdentityCheck check;
};
struct IdentityRun {
    std::vector<IdentityRow> rows;
    RunOutput out;
};
/// identity.functions (';'-separated expressions vanishing on the unit circle); three default cases.
[[nodiscard]] IdentityRun run_identity_check(const ExperimentConfig& cfg);

/// Writes csv to output.path and the sidecar next to it (".json" appended) when output.path is set.
void write_outputs(const ExperimentConfig& cfg, const RunOutput& out);

}  // namespace plapx
