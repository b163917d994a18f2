#include "rbridge/cli/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "rbridge/errors.hpp"

namespace rbridge::cli {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Cos, Sin, Abs, Log, Sign };

struct Expression::Node {
    Op op;
    double value = 0.0;
    std::size_t var = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr constant(double v) { return std::make_shared<Expression::Node>(Expression::Node{Op::Const, v, 0, nullptr, nullptr}); }
NodePtr variable(std::size_t i) { return std::make_shared<Expression::Node>(Expression::Node{Op::Var, 0.0, i, nullptr, nullptr}); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

double apply(Op op, double x, double y) {
    switch (op) {
        case Op::Add: return x + y;
        case Op::Sub: return x - y;
        case Op::Mul: return x * y;
        case Op::Div: return x / y;
        case Op::Pow: return std::pow(x, y);
        case Op::Neg: return -x;
        case Op::Exp: return std::exp(x);
        case Op::Cos: return std::cos(x);
        case Op::Sin: return std::sin(x);
        case Op::Abs: return std::abs(x);
        case Op::Log: return std::log(x);
        case Op::Sign: return static_cast<double>((x > 0.0) - (x < 0.0));
        default: return 0.0;
    }
}

// Builders fold constants and drop the trivial identities that symbolic
// differentiation produces in bulk.
NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
    if (a->op == Op::Const && (!b || b->op == Op::Const)) return constant(apply(op, a->value, b ? b->value : 0.0));
    switch (op) {
        case Op::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case Op::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return make(Op::Neg, b);
            break;
        case Op::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case Op::Div:
            if (is_const(a, 0.0)) return constant(0.0);
            if (is_const(b, 1.0)) return a;
            break;
        case Op::Pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return constant(1.0);
            break;
        default: break;
    }
    return std::make_shared<Expression::Node>(Expression::Node{op, 0.0, 0, std::move(a), std::move(b)});
}

double eval_node(const Expression::Node& n, std::span<const double> x) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return n.var < x.size() ? x[n.var] : 0.0;
        default: return apply(n.op, eval_node(*n.a, x), n.b ? eval_node(*n.b, x) : 0.0);
    }
}

bool uses_node(const Expression::Node& n, std::size_t axis) {
    if (n.op == Op::Var) return n.var == axis;
    return (n.a && uses_node(*n.a, axis)) || (n.b && uses_node(*n.b, axis));
}

NodePtr diff(const NodePtr& n, std::size_t axis) {
    if (!uses_node(*n, axis)) return constant(0.0);
    const NodePtr& u = n->a;
    const NodePtr& v = n->b;
    switch (n->op) {
        case Op::Var: return constant(1.0);
        case Op::Add: return make(Op::Add, diff(u, axis), diff(v, axis));
        case Op::Sub: return make(Op::Sub, diff(u, axis), diff(v, axis));
        case Op::Mul: return make(Op::Add, make(Op::Mul, diff(u, axis), v), make(Op::Mul, u, diff(v, axis)));
        case Op::Div:
            return make(Op::Div, make(Op::Sub, make(Op::Mul, diff(u, axis), v), make(Op::Mul, u, diff(v, axis))),
                        make(Op::Mul, v, v));
        case Op::Pow:
            if (!uses_node(*v, axis)) {
                return make(Op::Mul, make(Op::Mul, v, make(Op::Pow, u, make(Op::Sub, v, constant(1.0)))), diff(u, axis));
            }
            // d(u^v) = u^v (v' log u + v u' / u)
            return make(Op::Mul, n,
                        make(Op::Add, make(Op::Mul, diff(v, axis), make(Op::Log, u)),
                             make(Op::Div, make(Op::Mul, v, diff(u, axis)), u)));
        case Op::Neg: return make(Op::Neg, diff(u, axis));
        case Op::Exp: return make(Op::Mul, n, diff(u, axis));
        case Op::Cos: return make(Op::Neg, make(Op::Mul, make(Op::Sin, u), diff(u, axis)));
        case Op::Sin: return make(Op::Mul, make(Op::Cos, u), diff(u, axis));
        case Op::Abs: return make(Op::Mul, make(Op::Sign, u), diff(u, axis));
        case Op::Log: return make(Op::Div, diff(u, axis), u);
        default: return constant(0.0);
    }
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse() {
        next();
        NodePtr e = expr();
        if (tok_ != End) fail();
        return e;
    }

private:
    enum Kind { End, Number, Ident, Symbol };

    [[noreturn]] void fail() const {
        const std::string what = tok_ == End ? std::string("end of input") : "'" + std::string(text_) + "'";
        throw Error(ErrorCode::ConfigError, "unexpected " + what + " at position " + std::to_string(start_ + 1) +
                                                " in expression \"" + std::string(s_) + "\"");
    }

    void next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        start_ = pos_;
        if (pos_ == s_.size()) {
            tok_ = End;
            text_ = {};
            return;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            try {
                number_ = std::stod(std::string(s_.substr(pos_)), &used);
            } catch (const std::exception&) {
                used = 1;
                text_ = s_.substr(pos_, 1);
                tok_ = Symbol;
                fail();
            }
            tok_ = Number;
            text_ = s_.substr(pos_, used);
            pos_ += used;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
            tok_ = Ident;
            text_ = s_.substr(pos_, end - pos_);
            pos_ = end;
        } else {
            tok_ = Symbol;
            text_ = s_.substr(pos_, 1);
            ++pos_;
        }
    }

    bool symbol(char c) const { return tok_ == Symbol && text_[0] == c; }

    void expect(char c) {
        if (!symbol(c)) fail();
        next();
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (symbol('+') || symbol('-')) {
            const Op op = symbol('+') ? Op::Add : Op::Sub;
            next();
            lhs = make(op, lhs, term());
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (symbol('*') || symbol('/')) {
            const Op op = symbol('*') ? Op::Mul : Op::Div;
            next();
            lhs = make(op, lhs, unary());
        }
        return lhs;
    }

    NodePtr unary() {
        if (symbol('-')) {
            next();
            return make(Op::Neg, unary());
        }
        if (symbol('+')) {
            next();
            return unary();
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (symbol('^')) {
            next();
            return make(Op::Pow, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        if (tok_ == Number) {
            const double v = number_;
            next();
            return constant(v);
        }
        if (symbol('(')) {
            next();
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (tok_ != Ident) fail();
        const std::string_view id = text_;
        if (id == "x1" || id == "x2") {
            next();
            return variable(id == "x1" ? 0 : 1);
        }
        if (id == "pi") {
            next();
            return constant(std::numbers::pi);
        }
        Op op;
        if (id == "exp") op = Op::Exp;
        else if (id == "cos") op = Op::Cos;
        else if (id == "sin") op = Op::Sin;
        else if (id == "abs") op = Op::Abs;
        else fail();
        next();
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(op, arg);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t start_ = 0;
    Kind tok_ = End;
    std::string_view text_;
    double number_ = 0.0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text) : root_(std::move(root)), text_(std::move(text)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse(), std::string(text)); }

double Expression::eval(std::span<const double> x) const { return eval_node(*root_, x); }

Expression Expression::derivative(std::size_t axis) const {
    return Expression(diff(root_, axis), "d(" + text_ + ")/dx" + std::to_string(axis + 1));
}

bool Expression::uses(std::size_t axis) const { return uses_node(*root_, axis); }

}  // namespace rbridge::cli
