#pragma once

#include "plapx/assembly.hpp"
#include "plapx/expr.hpp"
#include "plapx/geometry.hpp"
#include "plapx/problem.hpp"
#include "plapx/varexp.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace plapx {

/// Coefficients of the non-divergence form a_ij u_ij = a_rhs at one point.
struct CoefficientSample {
    Point2 point;
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;
    double a_rhs = 0.0;
    double v_eps = 0.0;
    double p = 0.0;
};

/// a_ij = delta_ij + (p-2) u_i u_j / v^2 and a_rhs = ln(v) grad u . grad p + f v^(2-p),
/// v = (eps + |grad u|^2)^(1/2), using the constant gradient of the containing triangle.
/// LocationError for points outside the mesh; ParameterError for eps <= 0.
[[nodiscard]] std::vector<CoefficientSample> coefficients(const P1Function& u, const ExponentField& p,
                                                          const ScalarFunction& f, double eps,
                                                          std::span<const Point2> pts);

struct EllipticityResult {
    double min_margin = 0.0;  ///< smallest xi.a.xi minus the lower bound
    double max_margin = 0.0;  ///< smallest upper bound minus xi.a.xi
    std::size_t violations = 0;
    bool pass = true;
};

/// Checks min(p1-1, 1) <= xi.a.xi <= max(p2-1, 1) (tolerance 1e-10) for `trials` random
/// unit vectors per sample.
[[nodiscard]] EllipticityResult ellipticity_check(std::span<const CoefficientSample> samples, double p1, double p2,
                                                  int trials, std::uint64_t seed = 0);

/// Values of a field on the lattice {h (i, j)}. Points without a value are NaN.
/// `margin` is the distance every valued point keeps from the boundary.
struct GridSampling {
    int i0 = 0;  ///< lattice index of column 0
    int j0 = 0;
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double margin = 0.0;
    std::vector<double> values;

    [[nodiscard]] Point2 point(int i, int j) const { return {(i0 + i) * h, (j0 + j) * h}; }
    [[nodiscard]] double at(int i, int j) const { return values[static_cast<std::size_t>(j * nx + i)]; }
    [[nodiscard]] double& at(int i, int j) { return values[static_cast<std::size_t>(j * nx + i)]; }
    [[nodiscard]] std::size_t count_valid() const;
};

/// Lattice points at distance >= 2 h_g from the boundary, valued 0. The lattice is anchored at
/// the origin, so domains sharing a region share the lattice points in it.
[[nodiscard]] GridSampling interior_grid(const ConvexDomain& dom, double h_g);

/// Same lattice, valued by F.
template <class F>
[[nodiscard]] GridSampling sample_grid(GridSampling g, F&& fn)
{
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.at(i, j) == g.at(i, j)) g.at(i, j) = fn(g.point(i, j));
    return g;
}

/// order 1: (F(x + s h e_k) - F(x)) / (s h) with s = `sign`; order 2: the step -h quotient of
/// the step +h quotient. SamplingError if the margin does not cover the shifts.
[[nodiscard]] GridSampling difference_quotient(const GridSampling& g, int axis, int order, int sign = 1);

/// Componentwise lumped-mass average of the piecewise constant gradient.
[[nodiscard]] std::array<P1Function, 2> recovered_gradient(const P1Function& u);

struct DqEstimate {
    double value = 0.0;
    double window_area = 0.0;  ///< lattice points used times h_g^2
    std::vector<std::string> warnings;
};

/// Lattice l2 norm of first difference quotients of the recovered gradient: an interior
/// discrete H2 seminorm.
[[nodiscard]] DqEstimate h2_estimate_dq(const P1Function& u, const ConvexDomain& dom, double h_g);

/// L2 norm of the gradients of the recovered gradient components: a global discrete H2 seminorm.
[[nodiscard]] double h2_estimate_recovery(const P1Function& u);

/// Luxemburg norm of |grad u| with exponent p.
[[nodiscard]] double lp_gradient_norm(const P1Function& u, const ExponentField& p, const QuadratureContext& q);
[[nodiscard]] double lp_gradient_norm(const P1Function& u, std::span<const double> p_at_points,
                                      const QuadratureContext& q);

struct SetMeasures {
    double A1 = 0.0;      ///< {p = 2}
    double A2 = 0.0;      ///< {p < 2}
    double Omega1 = 0.0;  ///< {|grad u| > 1}
};
[[nodiscard]] SetMeasures set_measures(const P1Function& u, std::span<const double> p_at_points,
                                       const QuadratureContext& q);

/// Exponents of the Hoelder split on {p < 2}.
[[nodiscard]] double q_tilde(double p, double q);
[[nodiscard]] double mu_exponent(double q_tilde);
[[nodiscard]] double gamma_exponent(double p, double q);

struct SplitReport {
    double meas_A2 = 0.0;
    double q1 = 0.0;  ///< range of q over A2
    double q2 = 0.0;
    double q_tilde_min = 0.0;
    double q_tilde_max = 0.0;
    double mu_min = 0.0;
    double mu_max = 0.0;
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    double gamma_lower = 0.0;  ///< 1 + 2/q2
    double gamma_upper = 0.0;  ///< max(2, 2 + 8/(q1-2))
    bool band_ok = true;
    double direct = 0.0;  ///< ||f v^(2-p)||_{L2(A2)}
    double split = 0.0;   ///< ||f||_{q~(A2)} ||v^(2-p)||_{mu(A2)}
    double ratio = 0.0;   ///< direct / split
    bool holder_ok = true;
    double log_constant = 0.0;  ///< sup over Omega1 of ln(v) / v^(s/2)
    double log_bound = 0.0;     ///< 2 / (e s)
};

/// HypothesisError if q <= 2 at a quadrature point of {p < 2}.
[[nodiscard]] SplitReport integrability_split_report(const P1Function& u, const ExponentField& p,
                                                     const ScalarFunction& f, const ScalarFunction& q_exp, double eps,
                                                     double s, const QuadratureContext& q);
[[nodiscard]] SplitReport integrability_split_report(const P1Function& u, const ProblemSpec& spec, double eps,
                                                     const QuadratureContext& q);

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
};

/// Integral over the unit disk of u12^2 - u11 u22 against -(1/2) times the boundary integral
/// of (du/dnu)^2 (curvature 1). Polar Gauss-Legendre in r, trapezoid in angle.
/// PreconditionError if |u| > 1e-10 somewhere on the circle.
[[nodiscard]] IdentityCheck curvature_identity_check(const ScalarFieldExpr& u, int n_quad = 48);

struct ScalingReport {
    double slope = 0.0;
    double intercept = 0.0;
    double kappa = 1.0;
    double slope_bound = 1.5;  ///< kappa + 0.5
    bool pass = false;
    std::vector<std::string> warnings;
};

/// Least-squares slope of log(h2) against log(1/(p1 - 1)).
[[nodiscard]] ScalingReport p1_scaling_report(std::span<const double> p1, std::span<const double> h2,
                                              double kappa = 1.0);

}  // namespace plapx
