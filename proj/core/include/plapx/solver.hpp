#pragma once

#include "plapx/assembly.hpp"
#include "plapx/problem.hpp"

#include <memory>
#include <string>
#include <vector>

namespace plapx {

struct NewtonStats {
    int iterations = 0;        ///< accepted steps, Newton and Kacanov together
    int kacanov_iterations = 0;
    double final_residual = 0.0;            ///< max norm over interior rows
    std::vector<double> residual_history;   ///< max norm before each step and after the last
    std::vector<double> energy_history;     ///< J(u) - integral f u at the same iterates
    bool used_kacanov = false;
};

/// Newton (and Kacanov fallback) gave up; carries the iterate with the smallest residual.
class SolveFailure : public NonconvergenceError {
public:
    SolveFailure(const std::string& what, P1Function best, std::vector<double> history, double eps)
        : NonconvergenceError(what), best_(std::move(best)), history_(std::move(history)), eps_(eps) {}

    [[nodiscard]] const P1Function& best_iterate() const noexcept { return best_; }
    [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }
    [[nodiscard]] double eps() const noexcept { return eps_; }

private:
    P1Function best_;
    std::vector<double> history_;
    double eps_;
};

struct RegularizedSolution {
    P1Function u;
    NewtonStats stats;
};

/// Damped Newton for the eps-regularized problem, starting from u0 (boundary values are
/// reset to g). Steps are halved (at most 30 times) until the residual norm decreases and
/// J - integral f u does not increase. Stops when the max-norm residual is <= newton_tol.
[[nodiscard]] RegularizedSolution solve_regularized(const ProblemSpec& spec, const Discretization& disc, double eps,
                                                    const P1Function& u0);
[[nodiscard]] RegularizedSolution solve_regularized(const ProblemSpec& spec, const Discretization& disc, double eps,
                                                    const P1Function& u0, const EffectiveData& data);

struct EpsRecord {
    double eps = 0.0;
    int newton_iterations = 0;
    double final_residual = 0.0;
    double energy = 0.0;  ///< J(u_eps)
    double grad_lp_norm = 0.0;
    double h2_dq = 0.0;
    double h2_recovery = 0.0;
    double meas_A1 = 0.0;
    double meas_A2 = 0.0;
    double meas_Omega1 = 0.0;
    bool used_kacanov = false;
    P1Function u;
};

struct SolveReport {
    std::shared_ptr<const Discretization> disc;
    std::vector<EpsRecord> records;  ///< decreasing eps; the last one stands for the limit
    std::vector<std::string> warnings;
    std::string failure;  ///< set only when partial results were requested and a solve failed
    double failed_eps = 0.0;

    [[nodiscard]] bool failed() const { return !failure.empty(); }
    [[nodiscard]] const EpsRecord& final() const { return records.back(); }
};

/// eps continuation with warm starts. Solver errors are rethrown as SolveFailure with the
/// failing eps in the message and accessor, unless `keep_partial` is set, in which case the
/// sweep stops and the report carries the records so far plus the failure.
[[nodiscard]] SolveReport continuation_solve(const ProblemSpec& spec);
[[nodiscard]] SolveReport continuation_solve(const ProblemSpec& spec, std::shared_ptr<const Discretization> disc,
                                             bool keep_partial = false);

}  // namespace plapx
