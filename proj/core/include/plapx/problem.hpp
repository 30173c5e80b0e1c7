#pragma once

#include "plapx/assembly.hpp"
#include "plapx/expr.hpp"
#include "plapx/geometry.hpp"
#include "plapx/varexp.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace plapx {

/// Dirichlet problem -div((eps + |grad u|^2)^((p-2)/2) grad u) = f, u = g, together with the
/// eps schedule, discretization and solver controls.
struct ProblemSpec {
    ConvexDomain domain = ConvexDomain::unit_square();
    ExponentField p = ExponentField::constant(2.0);
    FieldPtr f = constant_field(0.0);
    FieldPtr g = constant_field(0.0);
    FieldPtr q;  ///< integrability exponent of f; unset means not checked

    double eps_start = 1.0;
    double eps_stop = 1e-6;
    double eps_factor = std::pow(10.0, -0.5);

    double mesh_h = 0.1;
    int refinements = 0;

    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    bool kacanov_fallback = true;

    double s_exponent = 0.5;  ///< free exponent of the log bound, in (0, 1)

    double mollify_delta = 0.0;    ///< > 0 switches to the mollified exponent with masked source
    double h2_grid_spacing = 0.0;  ///< lattice spacing of the difference-quotient estimator; 0 picks one

    /// ParameterError naming the first violated constraint on the numeric controls.
    void check() const;

    [[nodiscard]] std::vector<double> eps_schedule() const;
};

/// Mesh, quadrature and interior numbering shared by every solve on one spec.
class Discretization {
public:
    explicit Discretization(MeshPtr mesh);

    [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
    [[nodiscard]] const MeshPtr& mesh_ptr() const { return mesh_; }
    [[nodiscard]] const QuadratureContext& quadrature() const { return *quad_; }
    [[nodiscard]] const DofMap& dofs() const { return dofs_; }

private:
    MeshPtr mesh_;
    std::unique_ptr<QuadratureContext> quad_;
    DofMap dofs_;
};

[[nodiscard]] std::shared_ptr<const Discretization> discretize(const ProblemSpec& spec);

/// f where p_eps <= 2 and 0 where p_eps > 2.
[[nodiscard]] FieldPtr masked_source(FieldPtr f, const ExponentField& p_eps);

/// Exponent and source actually used by the solver: the mollified exponent with the masked
/// source when mollify_delta > 0, the given data otherwise.
struct EffectiveData {
    ExponentField p;
    FieldPtr f;
};
[[nodiscard]] EffectiveData effective_data(const ProblemSpec& spec);

/// Warnings for violated data hypotheses: f nonzero where p > 2, or q <= 2 where p <= 2.
/// p1 <= 1 is a HypothesisError.
[[nodiscard]] std::vector<std::string> validate_spec(const ProblemSpec& spec);

}  // namespace plapx
