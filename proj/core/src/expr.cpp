#include "plapx/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace plapx {

Vec2 ScalarFunction::gradient(Point2 p) const
{
    constexpr double h = 1e-3;
    auto d = [&](Vec2 e) {
        const double f2 = value(p + 2.0 * h * e);
        const double f1 = value(p + h * e);
        const double m1 = value(p - h * e);
        const double m2 = value(p - 2.0 * h * e);
        return (-f2 + 8.0 * f1 - 8.0 * m1 + m2) / (12.0 * h);
    };
    return {d({1.0, 0.0}), d({0.0, 1.0})};
}

FieldPtr constant_field(double c)
{
    return std::make_shared<FunctionField>([c](Point2) { return c; }, [](Point2) { return Vec2{}; });
}

FieldPtr make_field(FunctionField::ValueFn value, FunctionField::GradientFn gradient)
{
    return std::make_shared<FunctionField>(std::move(value), std::move(gradient));
}

namespace expr {
namespace {

NodePtr make(Op op, std::vector<NodePtr> args = {})
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
}

NodePtr num(double v)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Number;
    n->number = v;
    return n;
}

NodePtr call(Func f, std::vector<NodePtr> args)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Call;
    n->func = f;
    n->args = std::move(args);
    return n;
}

bool is_num(const NodePtr& n, double v) { return n->op == Op::Number && n->number == v; }
bool is_num(const NodePtr& n) { return n->op == Op::Number; }

// Constructors used by differentiation; they fold constants and drop neutral elements.
NodePtr neg(NodePtr a)
{
    if (is_num(a)) return num(-a->number);
    if (a->op == Op::Neg) return a->args[0];
    return make(Op::Neg, {std::move(a)});
}

NodePtr add(NodePtr a, NodePtr b)
{
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
    if (is_num(a) && is_num(b)) return num(a->number + b->number);
    return make(Op::Add, {std::move(a), std::move(b)});
}

NodePtr sub(NodePtr a, NodePtr b)
{
    if (is_num(b, 0.0)) return a;
    if (is_num(a, 0.0)) return neg(std::move(b));
    if (is_num(a) && is_num(b)) return num(a->number - b->number);
    return make(Op::Sub, {std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b)
{
    if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
    if (is_num(a) && is_num(b)) return num(a->number * b->number);
    return make(Op::Mul, {std::move(a), std::move(b)});
}

NodePtr div(NodePtr a, NodePtr b)
{
    if (is_num(a, 0.0)) return num(0.0);
    if (is_num(b, 1.0)) return a;
    if (is_num(a) && is_num(b) && b->number != 0.0) return num(a->number / b->number);
    return make(Op::Div, {std::move(a), std::move(b)});
}

NodePtr pow(NodePtr a, NodePtr b)
{
    if (is_num(b, 1.0)) return a;
    if (is_num(b, 0.0)) return num(1.0);
    return make(Op::Pow, {std::move(a), std::move(b)});
}

// Returns nullptr when the subtree has no closed-form derivative.
NodePtr differentiate(const NodePtr& n, Op var)
{
    switch (n->op) {
    case Op::Number:
        return num(0.0);
    case Op::VarX:
    case Op::VarY:
        return num(n->op == var ? 1.0 : 0.0);
    default:
        break;
    }

    std::vector<NodePtr> d;
    d.reserve(n->args.size());
    for (const auto& a : n->args) {
        auto da = differentiate(a, var);
        if (!da) return nullptr;
        d.push_back(std::move(da));
    }
    const auto& a = n->args[0];

    switch (n->op) {
    case Op::Neg:
        return neg(d[0]);
    case Op::Add:
        return add(d[0], d[1]);
    case Op::Sub:
        return sub(d[0], d[1]);
    case Op::Mul:
        return add(mul(d[0], n->args[1]), mul(a, d[1]));
    case Op::Div: {
        const auto& b = n->args[1];
        return div(sub(mul(d[0], b), mul(a, d[1])), mul(b, b));
    }
    case Op::Pow: {
        const auto& b = n->args[1];
        if (is_num(d[1], 0.0)) return mul(mul(b, pow(a, sub(b, num(1.0)))), d[0]);
        return mul(n, add(mul(d[1], call(Func::Log, {a})), div(mul(b, d[0]), a)));
    }
    case Op::Call:
        switch (n->func) {
        case Func::Sin:
            return mul(call(Func::Cos, {a}), d[0]);
        case Func::Cos:
            return neg(mul(call(Func::Sin, {a}), d[0]));
        case Func::Exp:
            return mul(n, d[0]);
        case Func::Log:
            return div(d[0], a);
        case Func::Abs:
            return mul(div(a, n), d[0]);
        case Func::Sqrt:
            return div(d[0], mul(num(2.0), n));
        case Func::Min:
        case Func::Max:
            return nullptr;
        }
        break;
    default:
        break;
    }
    return nullptr;
}

[[noreturn]] void eval_fail(const char* what, Point2 p)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s at (x, y) = (%.17g, %.17g)", what, p.x, p.y);
    throw EvaluationError(buf);
}

double eval(const Node& n, Point2 p)
{
    switch (n.op) {
    case Op::Number:
        return n.number;
    case Op::VarX:
        return p.x;
    case Op::VarY:
        return p.y;
    case Op::Neg:
        return -eval(*n.args[0], p);
    case Op::Add:
        return eval(*n.args[0], p) + eval(*n.args[1], p);
    case Op::Sub:
        return eval(*n.args[0], p) - eval(*n.args[1], p);
    case Op::Mul:
        return eval(*n.args[0], p) * eval(*n.args[1], p);
    case Op::Div: {
        const double den = eval(*n.args[1], p);
        if (den == 0.0) eval_fail("division by zero", p);
        return eval(*n.args[0], p) / den;
    }
    case Op::Pow: {
        const double r = std::pow(eval(*n.args[0], p), eval(*n.args[1], p));
        if (!std::isfinite(r)) eval_fail("non-finite power", p);
        return r;
    }
    case Op::Call: {
        const double a = eval(*n.args[0], p);
        switch (n.func) {
        case Func::Sin:
            return std::sin(a);
        case Func::Cos:
            return std::cos(a);
        case Func::Exp: {
            const double r = std::exp(a);
            if (!std::isfinite(r)) eval_fail("exp overflow", p);
            return r;
        }
        case Func::Log:
            if (!(a > 0.0)) eval_fail("log of non-positive argument", p);
            return std::log(a);
        case Func::Abs:
            return std::abs(a);
        case Func::Sqrt:
            if (a < 0.0) eval_fail("sqrt of negative argument", p);
            return std::sqrt(a);
        case Func::Min:
            return std::min(a, eval(*n.args[1], p));
        case Func::Max:
            return std::max(a, eval(*n.args[1], p));
        }
    }
    }
    return 0.0;
}

constexpr std::array<std::pair<std::string_view, Func>, 8> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"abs", Func::Abs},
    {"sqrt", Func::Sqrt},
    {"min", Func::Min},
    {"max", Func::Max},
}};

std::string_view func_name(Func f)
{
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

void print_node(const Node& n, std::ostringstream& os)
{
    auto binary = [&](const char* sym) {
        os << '(';
        print_node(*n.args[0], os);
        os << ' ' << sym << ' ';
        print_node(*n.args[1], os);
        os << ')';
    };
    switch (n.op) {
    case Op::Number: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", std::abs(n.number));
        if (std::signbit(n.number))
            os << "(-" << buf << ')';
        else
            os << buf;
        break;
    }
    case Op::VarX:
        os << 'x';
        break;
    case Op::VarY:
        os << 'y';
        break;
    case Op::Neg:
        os << "(-";
        print_node(*n.args[0], os);
        os << ')';
        break;
    case Op::Add:
        binary("+");
        break;
    case Op::Sub:
        binary("-");
        break;
    case Op::Mul:
        binary("*");
        break;
    case Op::Div:
        binary("/");
        break;
    case Op::Pow:
        binary("^");
        break;
    case Op::Call:
        os << func_name(n.func) << '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) os << ", ";
            print_node(*n.args[i], os);
        }
        os << ')';
        break;
    }
}

bool depends_on_xy(const Node& n)
{
    if (n.op == Op::VarX || n.op == Op::VarY) return true;
    for (const auto& a : n.args)
        if (depends_on_xy(*a)) return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse()
    {
        auto n = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character");
        return n;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(what + " at byte offset " + std::to_string(pos_), pos_);
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr parse_sum()
    {
        auto lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = make(Op::Add, {lhs, parse_product()});
            else if (accept('-'))
                lhs = make(Op::Sub, {lhs, parse_product()});
            else
                return lhs;
        }
    }

    NodePtr parse_product()
    {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Op::Mul, {lhs, parse_unary()});
            else if (accept('/'))
                lhs = make(Op::Div, {lhs, parse_unary()});
            else
                return lhs;
        }
    }

    NodePtr parse_unary()
    {
        if (accept('-')) return make(Op::Neg, {parse_unary()});
        return parse_power();
    }

    NodePtr parse_power()
    {
        auto base = parse_primary();
        if (accept('^')) return make(Op::Pow, {base, parse_unary()});
        return base;
    }

    NodePtr parse_primary()
    {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = parse_sum();
            expect(')');
            return n;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9')
                digits();
            else
                pos_ = save;  // "2e" followed by something else: let the caller see 'e'
        }
        double v = 0.0;
        const auto* first = src_.data() + start;
        const auto* last = src_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            pos_ = start;
            fail("malformed number");
        }
        return num(v);
    }

    NodePtr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return make(Op::VarX);
        if (name == "y") return make(Op::VarY);
        if (name == "pi") return num(std::numbers::pi);
        if (name == "e") return num(std::numbers::e);
        for (const auto& [fname, f] : kFunctions) {
            if (name != fname) continue;
            expect('(');
            std::vector<NodePtr> args{parse_sum()};
            if (f == Func::Min || f == Func::Max) {
                expect(',');
                args.push_back(parse_sum());
            }
            expect(')');
            return call(f, std::move(args));
        }
        throw UnknownIdentifierError("unknown identifier '" + std::string(name) + "' at byte offset " + std::to_string(start),
                                     start, std::string(name));
    }
};

}  // namespace

bool structurally_equal(const Node& a, const Node& b)
{
    if (a.op != b.op || a.args.size() != b.args.size()) return false;
    if (a.op == Op::Number && a.number != b.number) return false;
    if (a.op == Op::Call && a.func != b.func) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

}  // namespace expr

ScalarFieldExpr::ScalarFieldExpr(expr::NodePtr root)
    : root_(std::move(root)),
      dx_(expr::differentiate(root_, expr::Op::VarX)),
      dy_(expr::differentiate(root_, expr::Op::VarY))
{
}

double ScalarFieldExpr::value(Point2 x) const { return expr::eval(*root_, x); }

Vec2 ScalarFieldExpr::gradient(Point2 x) const
{
    if (dx_ && dy_) {
        try {
            return {expr::eval(*dx_, x), expr::eval(*dy_, x)};
        } catch (const EvaluationError&) {
            // e.g. d|t|/dt at t = 0; the difference quotient is still well defined
        }
    }
    return ScalarFunction::gradient(x);
}

std::optional<ScalarFieldExpr> ScalarFieldExpr::derivative(int axis) const
{
    const auto& d = axis == 0 ? dx_ : dy_;
    if (!d) return std::nullopt;
    return ScalarFieldExpr(d);
}

std::string ScalarFieldExpr::print() const
{
    std::ostringstream os;
    expr::print_node(*root_, os);
    return os.str();
}

bool ScalarFieldExpr::is_constant() const { return !expr::depends_on_xy(*root_); }

ScalarFieldExpr parse_field(std::string_view src) { return ScalarFieldExpr(expr::Parser(src).parse()); }

std::shared_ptr<const ScalarFieldExpr> parse_field_ptr(std::string_view src)
{
    return std::make_shared<const ScalarFieldExpr>(parse_field(src));
}

}  // namespace plapx
