#pragma once

#include "plapx/expr.hpp"
#include "plapx/geometry.hpp"
#include "plapx/quadrature.hpp"

#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace plapx {

/// Variable exponent p(x) together with its essential bounds and a Lipschitz estimate.
///
/// Bounds are either supplied or estimated by dense sampling of the domain. The estimate
/// of the Lipschitz constant carries a 1% margin over the sampled maximum slope.
class ExponentField {
public:
    ExponentField(FieldPtr fn, double p1, double p2, double lip);

    /// Estimates p1, p2 and lip from at least `min_samples` points of the domain.
    static ExponentField sampled(FieldPtr fn, const ConvexDomain& dom, int min_samples = 10000);
    static ExponentField constant(double c);

    [[nodiscard]] double operator()(Point2 x) const { return fn_->value(x); }
    [[nodiscard]] Vec2 gradient(Point2 x) const { return fn_->gradient(x); }
    [[nodiscard]] const FieldPtr& function() const { return fn_; }

    [[nodiscard]] double p1() const { return p1_; }
    [[nodiscard]] double p2() const { return p2_; }
    [[nodiscard]] double lip() const { return lip_; }
    [[nodiscard]] bool is_constant() const { return p1_ == p2_; }

private:
    FieldPtr fn_;
    double p1_;
    double p2_;
    double lip_;
};

/// Anything that can be evaluated at a quadrature point: closed-form fields, P1 functions,
/// their gradients, products of fields.
using QuadField = std::function<double(const QuadPoint&)>;

[[nodiscard]] QuadField at_points(FieldPtr f);
[[nodiscard]] QuadField at_points(const ExponentField& p);

/// Evaluates at every quadrature point; EvaluationError names the first non-finite point.
[[nodiscard]] std::vector<double> sample(const QuadField& u, const QuadratureContext& q);

/// Quadrature value of the modular, the integral of |u|^p.
[[nodiscard]] double modular(const QuadField& u, const ExponentField& p, const QuadratureContext& q);
[[nodiscard]] double modular(std::span<const double> u, std::span<const double> p, std::span<const double> w);

/// Luxemburg norm inf{k > 0 : modular(u/k) <= 1}, by bisection on log k.
[[nodiscard]] double luxemburg_norm(const QuadField& u, const ExponentField& p, const QuadratureContext& q);
[[nodiscard]] double luxemburg_norm(std::span<const double> u, std::span<const double> p, std::span<const double> w);

struct HolderCheck {
    double lhs = 0.0;  ///< ||f g||_s
    double rhs = 0.0;  ///< 2 ||f||_p ||g||_q
    bool satisfied = false;
};

/// Hoelder inequality with constant 2. Requires 1/p + 1/q = 1/s at every quadrature point
/// (PreconditionError reports the worst point otherwise).
[[nodiscard]] HolderCheck holder_check(const QuadField& f, const QuadField& g, const ExponentField& p,
                                       const ExponentField& q_exp, const ExponentField& s, const QuadratureContext& q);

/// N p / (N - p) for p < N, +infinity otherwise.
[[nodiscard]] constexpr double sobolev_conjugate(double p, int n)
{
    if (p < n) return n * p / (n - p);
    return std::numeric_limits<double>::infinity();
}

using PointPair = std::pair<Point2, Point2>;

/// max |p(x) - p(y)| log(e + 1/|x - y|) over the given pairs.
[[nodiscard]] double log_holder_modulus(const ExponentField& p, std::span<const PointPair> pairs);

/// All pairs of an n-by-n grid covering the domain's bounding box, restricted to the domain.
[[nodiscard]] std::vector<PointPair> grid_pairs(const ConvexDomain& dom, int n);

/// Mollification of p at scale delta. p is first extended outside the domain by its value at
/// the closest domain point, then averaged against a radial bump kernel of radius delta.
/// The result stays within lip * delta of p and has Lipschitz constant at most lip.
[[nodiscard]] ExponentField mollify_exponent(const ExponentField& p, double delta, const ConvexDomain& dom);

}  // namespace plapx
