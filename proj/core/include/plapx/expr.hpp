#pragma once

#include "plapx/error.hpp"
#include "plapx/vec2.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plapx {

/// A real-valued function of (x, y). Exponents, data and manufactured solutions all implement it.
class ScalarFunction {
public:
    virtual ~ScalarFunction() = default;

    [[nodiscard]] virtual double value(Point2 x) const = 0;

    /// Defaults to fourth-order central differences.
    [[nodiscard]] virtual Vec2 gradient(Point2 x) const;
};

using FieldPtr = std::shared_ptr<const ScalarFunction>;

/// Wraps an arbitrary callable; gradient optional.
class FunctionField final : public ScalarFunction {
public:
    using ValueFn = std::function<double(Point2)>;
    using GradientFn = std::function<Vec2(Point2)>;

    explicit FunctionField(ValueFn value, GradientFn gradient = {})
        : value_(std::move(value)), gradient_(std::move(gradient)) {}

    [[nodiscard]] double value(Point2 x) const override { return value_(x); }
    [[nodiscard]] Vec2 gradient(Point2 x) const override
    {
        return gradient_ ? gradient_(x) : ScalarFunction::gradient(x);
    }

private:
    ValueFn value_;
    GradientFn gradient_;
};

[[nodiscard]] FieldPtr constant_field(double c);
[[nodiscard]] FieldPtr make_field(FunctionField::ValueFn value, FunctionField::GradientFn gradient = {});

namespace expr {

enum class Op { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Log, Abs, Sqrt, Min, Max };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Number;
    double number = 0.0;
    Func func = Func::Sin;
    std::vector<NodePtr> args;
};

[[nodiscard]] bool structurally_equal(const Node& a, const Node& b);

}  // namespace expr

/// Unknown function or variable name in a field expression.
class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(const std::string& what, std::size_t offset, std::string name)
        : ParseError(what, offset), name_(std::move(name)) {}
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Parsed closed-form function of (x, y).
///
/// Grammar: numbers, the variables `x` `y`, the constants `pi` `e`, binary `+ - * / ^`,
/// unary `-`, the functions `sin cos exp log abs sqrt min max`, and parentheses.
/// Precedence from tightest: `^` (right associative), unary minus, `* /`, `+ -`.
///
/// Evaluation throws EvaluationError instead of producing NaN or infinity.
class ScalarFieldExpr final : public ScalarFunction {
public:
    explicit ScalarFieldExpr(expr::NodePtr root);

    [[nodiscard]] double value(Point2 x) const override;
    [[nodiscard]] double operator()(double x, double y) const { return value({x, y}); }

    /// Symbolic gradient when every node is differentiable, otherwise central differences.
    [[nodiscard]] Vec2 gradient(Point2 x) const override;

    /// Partial derivative with respect to x (axis 0) or y (axis 1). Empty if the expression
    /// uses min/max, which have no closed-form derivative in this grammar.
    [[nodiscard]] std::optional<ScalarFieldExpr> derivative(int axis) const;

    /// Fully parenthesised source that parses back to a structurally identical tree.
    [[nodiscard]] std::string print() const;

    [[nodiscard]] const expr::Node& root() const { return *root_; }
    [[nodiscard]] bool is_constant() const;

private:
    expr::NodePtr root_;
    expr::NodePtr dx_;
    expr::NodePtr dy_;
};

[[nodiscard]] ScalarFieldExpr parse_field(std::string_view src);
[[nodiscard]] std::shared_ptr<const ScalarFieldExpr> parse_field_ptr(std::string_view src);

}  // namespace plapx
