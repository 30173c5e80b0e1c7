#include "plapx/solver.hpp"

#include "plapx/error.hpp"
#include "plapx/linear_solve.hpp"
#include "plapx/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace plapx {

namespace {

SparseSymmetricOperator interior_block(const SparseSymmetricOperator& a, const DofMap& dofs)
{
    std::vector<Eigen::Triplet<double>> trip;
    const auto& m = a.matrix();
    for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
        const int jc = dofs.index[static_cast<std::size_t>(col)];
        if (jc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it) {
            const int ir = dofs.index[static_cast<std::size_t>(it.row())];
            if (ir >= 0) trip.emplace_back(ir, jc, it.value());
        }
    }
    Eigen::SparseMatrix<double> r(dofs.size(), dofs.size());
    r.setFromTriplets(trip.begin(), trip.end());
    return SparseSymmetricOperator(std::move(r));
}

std::string eps_str(double eps)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", eps);
    return buf;
}

RegularizedSolution newton(const ProblemSpec& spec, const Discretization& disc, double eps, const P1Function& u0,
                           const QuadData& d)
{
    if (!(eps > 0.0)) throw ParameterError("regularized solve needs eps > 0");
    const DofMap& dofs = disc.dofs();
    RegularizedSolution out{u0, {}};
    P1Function& u = out.u;
    NewtonStats& st = out.stats;
    u.impose_boundary(*spec.g);

    Eigen::VectorXd r = assemble_residual(u, d, eps);
    double r_inf = r.lpNorm<Eigen::Infinity>();
    double r_two = r.norm();
    double phi = total_energy(u, d, eps);
    st.residual_history.push_back(r_inf);
    st.energy_history.push_back(phi);
    P1Function best = u;
    double best_r = r_inf;

    auto iterate = [&](LinearizationKind kind, int budget, int& counter) {
        for (int it = 0; it < budget; ++it) {
            if (r_inf <= spec.newton_tol) return true;
            const auto a = interior_block(assemble_jacobian(u, d, eps, kind), dofs);
            const Eigen::VectorXd step = linear_solve(a, -dofs.restrict(r));

            bool accepted = false;
            double t = 1.0;
            for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
                P1Function trial = u;
                for (std::size_t k = 0; k < dofs.interior.size(); ++k)
                    trial.coeffs()[static_cast<std::size_t>(dofs.interior[k])] += t * step[static_cast<Eigen::Index>(k)];
                Eigen::VectorXd rt = assemble_residual(trial, d, eps);
                const double rt_two = rt.norm();
                const double phi_t = total_energy(trial, d, eps);
                if (rt_two < r_two && phi_t <= phi + 1e-12 * std::max(1.0, std::abs(phi))) {
                    u = std::move(trial);
                    r = std::move(rt);
                    r_two = rt_two;
                    r_inf = r.lpNorm<Eigen::Infinity>();
                    phi = phi_t;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) return false;
            ++counter;
            st.residual_history.push_back(r_inf);
            st.energy_history.push_back(phi);
            if (r_inf < best_r) {
                best_r = r_inf;
                best = u;
            }
        }
        return r_inf <= spec.newton_tol;
    };

    int newton_steps = 0;
    bool done = iterate(LinearizationKind::Newton, spec.newton_max_iter, newton_steps);
    st.iterations = newton_steps;
    if (!done && spec.kacanov_fallback) {
        st.used_kacanov = true;
        done = iterate(LinearizationKind::Kacanov, 10 * spec.newton_max_iter, st.kacanov_iterations);
        st.iterations += st.kacanov_iterations;
    }
    st.final_residual = r_inf;
    if (!done) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "no convergence at eps = %s: residual %.3e after %d steps (tolerance %.3e)",
                      eps_str(eps).c_str(), best_r, st.iterations, spec.newton_tol);
        throw SolveFailure(buf, best, st.residual_history, eps);
    }
    return out;
}

}  // namespace

RegularizedSolution solve_regularized(const ProblemSpec& spec, const Discretization& disc, double eps,
                                      const P1Function& u0, const EffectiveData& data)
{
    return newton(spec, disc, eps, u0, quad_data(disc.quadrature(), data.p, *data.f));
}

RegularizedSolution solve_regularized(const ProblemSpec& spec, const Discretization& disc, double eps,
                                      const P1Function& u0)
{
    return solve_regularized(spec, disc, eps, u0, effective_data(spec));
}

SolveReport continuation_solve(const ProblemSpec& spec) { return continuation_solve(spec, discretize(spec)); }

SolveReport continuation_solve(const ProblemSpec& spec, std::shared_ptr<const Discretization> disc, bool keep_partial)
{
    spec.check();
    SolveReport report;
    report.warnings = validate_spec(spec);
    report.disc = disc;
    const auto data = effective_data(spec);
    const auto& quad = disc->quadrature();
    const QuadData d = quad_data(quad, data.p, *data.f);
    const double h_g =
        spec.h2_grid_spacing > 0.0 ? spec.h2_grid_spacing : std::max(disc->mesh().h(), spec.domain.diameter() / 40.0);

    P1Function u = P1Function::zero(disc->mesh_ptr());
    u.impose_boundary(*spec.g);
    bool resolution_warned = false;
    for (double eps : spec.eps_schedule()) {
        RegularizedSolution sol;
        try {
            sol = newton(spec, *disc, eps, u, d);
        } catch (const SolveFailure& e) {
            if (keep_partial) {
                report.failure = e.what();
                report.failed_eps = eps;
                break;
            }
            throw SolveFailure(std::string("continuation: ") + e.what(), e.best_iterate(), e.residual_history(), eps);
        } catch (const SpdError& e) {
            if (keep_partial) {
                report.failure = e.what();
                report.failed_eps = eps;
                break;
            }
            throw SpdError("eps = " + eps_str(eps) + ": " + e.what(), e.pivot());
        }
        u = sol.u;

        EpsRecord rec;
        rec.eps = eps;
        rec.newton_iterations = sol.stats.iterations;
        rec.final_residual = sol.stats.final_residual;
        rec.used_kacanov = sol.stats.used_kacanov;
        rec.energy = energy(u, d, eps);
        rec.grad_lp_norm = lp_gradient_norm(u, d.p, quad);
        auto dq = h2_estimate_dq(u, spec.domain, h_g);
        if (!dq.warnings.empty() && !resolution_warned) {
            report.warnings.insert(report.warnings.end(), dq.warnings.begin(), dq.warnings.end());
            resolution_warned = true;
        }
        rec.h2_dq = dq.value;
        rec.h2_recovery = h2_estimate_recovery(u);
        const auto m = set_measures(u, d.p, quad);
        rec.meas_A1 = m.A1;
        rec.meas_A2 = m.A2;
        rec.meas_Omega1 = m.Omega1;
        rec.u = u;
        report.records.push_back(std::move(rec));
    }
    return report;
}

}  // namespace plapx
