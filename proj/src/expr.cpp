#include "qbnb/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "qbnb/errors.hpp"

namespace qbnb {

namespace {

double ipow_value(double x, int n) {
    double acc = 1.0;
    double base = x;
    unsigned un = static_cast<unsigned>(n);
    while (un > 0) {
        if (un & 1u) acc *= base;
        base *= base;
        un >>= 1u;
    }
    return acc;
}

}  // namespace

Expr Expr::make(Kind k, double value, int var, int exponent, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = value;
    n->var = var;
    n->exponent = exponent;
    n->max_var = var;
    if (a) n->max_var = std::max(n->max_var, a->max_var);
    if (b) n->max_var = std::max(n->max_var, b->max_var);
    n->a = std::move(a);
    n->b = std::move(b);
    return Expr(std::move(n));
}

Expr Expr::constant(double v) { return make(Kind::Constant, v, -1, 0, nullptr, nullptr); }

Expr Expr::variable(int index) {
    if (index < 0) throw std::invalid_argument("variable index must be >= 0");
    return make(Kind::Variable, 0.0, index, 0, nullptr, nullptr);
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return Expr::make(Expr::Kind::Add, 0.0, -1, 0, a.node_, b.node_);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return Expr::make(Expr::Kind::Sub, 0.0, -1, 0, a.node_, b.node_);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return Expr::make(Expr::Kind::Mul, 0.0, -1, 0, a.node_, b.node_);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
        return Expr::constant(a.constant_value() / b.constant_value());
    // Zero numerator: treat 0/g as identically zero. Derivative rules emit
    // this shape constantly and keeping the division alive would poison
    // interval evaluation of otherwise well-defined derivative trees.
    if (a.is_constant(0.0)) return Expr::constant(0.0);
    if (b.is_constant(1.0)) return a;
    return Expr::make(Expr::Kind::Div, 0.0, -1, 0, a.node_, b.node_);
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.kind() == Expr::Kind::Neg) return Expr(a.node_->a);
    return Expr::make(Expr::Kind::Neg, 0.0, -1, 0, a.node_, nullptr);
}

Expr Expr::int_pow(const Expr& a, int n) {
    if (n < 0) throw std::invalid_argument("int_pow exponent must be >= 0");
    if (n == 0) return constant(1.0);
    if (n == 1) return a;
    if (a.is_constant()) return constant(ipow_value(a.constant_value(), n));
    return make(Kind::IntPow, 0.0, -1, n, a.node_, nullptr);
}

Expr Expr::sin(const Expr& a) {
    if (a.is_constant()) return constant(std::sin(a.constant_value()));
    return make(Kind::Sin, 0.0, -1, 0, a.node_, nullptr);
}

Expr Expr::cos(const Expr& a) {
    if (a.is_constant()) return constant(std::cos(a.constant_value()));
    return make(Kind::Cos, 0.0, -1, 0, a.node_, nullptr);
}

Expr Expr::exp(const Expr& a) {
    if (a.is_constant()) return constant(std::exp(a.constant_value()));
    return make(Kind::Exp, 0.0, -1, 0, a.node_, nullptr);
}

Expr Expr::sqrt(const Expr& a) {
    // Fold only when the result is a real number.
    if (a.is_constant() && a.constant_value() >= 0.0) return constant(std::sqrt(a.constant_value()));
    return make(Kind::Sqrt, 0.0, -1, 0, a.node_, nullptr);
}

double Expr::eval(std::span<const double> x) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::Variable:
            if (n.var >= static_cast<int>(x.size())) throw std::out_of_range("variable index beyond input dimension");
            return x[static_cast<std::size_t>(n.var)];
        case Kind::Add: return Expr(n.a).eval(x) + Expr(n.b).eval(x);
        case Kind::Sub: return Expr(n.a).eval(x) - Expr(n.b).eval(x);
        case Kind::Mul: return Expr(n.a).eval(x) * Expr(n.b).eval(x);
        case Kind::Div: return Expr(n.a).eval(x) / Expr(n.b).eval(x);
        case Kind::Neg: return -Expr(n.a).eval(x);
        case Kind::IntPow: return ipow_value(Expr(n.a).eval(x), n.exponent);
        case Kind::Sin: return std::sin(Expr(n.a).eval(x));
        case Kind::Cos: return std::cos(Expr(n.a).eval(x));
        case Kind::Exp: return std::exp(Expr(n.a).eval(x));
        case Kind::Sqrt: return std::sqrt(Expr(n.a).eval(x));
    }
    return 0.0;
}

Interval Expr::eval_interval(const Box& domain) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Constant: return Interval::point(n.value);
        case Kind::Variable:
            if (n.var >= domain.dim()) throw std::out_of_range("variable index beyond box dimension");
            return {domain.lower[static_cast<std::size_t>(n.var)], domain.upper[static_cast<std::size_t>(n.var)]};
        case Kind::Add: return Expr(n.a).eval_interval(domain) + Expr(n.b).eval_interval(domain);
        case Kind::Sub: return Expr(n.a).eval_interval(domain) - Expr(n.b).eval_interval(domain);
        case Kind::Mul: return Expr(n.a).eval_interval(domain) * Expr(n.b).eval_interval(domain);
        case Kind::Div: return Expr(n.a).eval_interval(domain) / Expr(n.b).eval_interval(domain);
        case Kind::Neg: return -Expr(n.a).eval_interval(domain);
        case Kind::IntPow: return qbnb::int_pow(Expr(n.a).eval_interval(domain), n.exponent);
        case Kind::Sin: return qbnb::sin(Expr(n.a).eval_interval(domain));
        case Kind::Cos: return qbnb::cos(Expr(n.a).eval_interval(domain));
        case Kind::Exp: return qbnb::exp(Expr(n.a).eval_interval(domain));
        case Kind::Sqrt: return qbnb::sqrt(Expr(n.a).eval_interval(domain));
    }
    return Interval::point(0.0);
}

Expr Expr::differentiate(int i) const {
    const Node& n = *node_;
    const Expr a = n.a ? Expr(n.a) : Expr();
    const Expr b = n.b ? Expr(n.b) : Expr();
    switch (n.kind) {
        case Kind::Constant: return constant(0.0);
        case Kind::Variable: return constant(n.var == i ? 1.0 : 0.0);
        case Kind::Add: return a.differentiate(i) + b.differentiate(i);
        case Kind::Sub: return a.differentiate(i) - b.differentiate(i);
        case Kind::Mul: return a.differentiate(i) * b + a * b.differentiate(i);
        case Kind::Div:
            return (a.differentiate(i) * b - a * b.differentiate(i)) / int_pow(b, 2);
        case Kind::Neg: return -a.differentiate(i);
        case Kind::IntPow:
            return constant(static_cast<double>(n.exponent)) * int_pow(a, n.exponent - 1) * a.differentiate(i);
        case Kind::Sin: return cos(a) * a.differentiate(i);
        case Kind::Cos: return -sin(a) * a.differentiate(i);
        case Kind::Exp: return exp(a) * a.differentiate(i);
        case Kind::Sqrt: return a.differentiate(i) / (constant(2.0) * sqrt(a));
    }
    return constant(0.0);
}

namespace {

void str_rec(const Expr::Node& n, std::ostringstream& out) {
    using Kind = Expr::Kind;
    switch (n.kind) {
        case Kind::Constant: out << n.value; return;
        case Kind::Variable: out << 'x' << (n.var + 1); return;
        case Kind::Add: out << '('; str_rec(*n.a, out); out << " + "; str_rec(*n.b, out); out << ')'; return;
        case Kind::Sub: out << '('; str_rec(*n.a, out); out << " - "; str_rec(*n.b, out); out << ')'; return;
        case Kind::Mul: out << '('; str_rec(*n.a, out); out << " * "; str_rec(*n.b, out); out << ')'; return;
        case Kind::Div: out << '('; str_rec(*n.a, out); out << " / "; str_rec(*n.b, out); out << ')'; return;
        case Kind::Neg: out << "(-"; str_rec(*n.a, out); out << ')'; return;
        case Kind::IntPow: out << '('; str_rec(*n.a, out); out << ")^" << n.exponent; return;
        case Kind::Sin: out << "sin("; str_rec(*n.a, out); out << ')'; return;
        case Kind::Cos: out << "cos("; str_rec(*n.a, out); out << ')'; return;
        case Kind::Exp: out << "exp("; str_rec(*n.a, out); out << ')'; return;
        case Kind::Sqrt: out << "sqrt("; str_rec(*n.a, out); out << ')'; return;
    }
}

size_t count_rec(const Expr::Node& n) {
    size_t c = 1;
    if (n.a) c += count_rec(*n.a);
    if (n.b) c += count_rec(*n.b);
    return c;
}

}  // namespace

std::string Expr::str() const {
    std::ostringstream out;
    out.precision(17);
    str_rec(*node_, out);
    return out.str();
}

size_t Expr::node_count() const { return count_rec(*node_); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    Expr parse() {
        Expr e = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    Expr expression() {
        Expr e = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                e = e + term();
            } else if (accept('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                e = e / unary();
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        skip_ws();
        if (accept('-')) return -unary();
        return power();
    }

    Expr power() {
        Expr base = atom();
        skip_ws();
        if (!accept('^')) return base;
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected a nonnegative integer exponent after '^'");
        return Expr::int_pow(base, std::atoi(text_.substr(start, pos_ - start).c_str()));
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (accept('(')) {
            Expr e = expression();
            skip_ws();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected character");
        return Expr();  // unreachable
    }

    Expr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return Expr::constant(v);
    }

    Expr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "x") {
            std::size_t dstart = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == dstart) fail("expected a variable index after 'x'");
            const int idx = std::atoi(text_.substr(dstart, pos_ - dstart).c_str());
            if (idx < 1) fail("variable indices start at x1");
            return Expr::variable(idx - 1);
        }
        skip_ws();
        if (!accept('(')) fail("expected '(' after function name '" + name + "'");
        Expr arg = expression();
        skip_ws();
        if (!accept(')')) fail("expected ')'");
        if (name == "sin") return Expr::sin(arg);
        if (name == "cos") return Expr::cos(arg);
        if (name == "exp") return Expr::exp(arg);
        if (name == "sqrt") return Expr::sqrt(arg);
        fail("unknown function '" + name + "'");
        return Expr();  // unreachable
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at position " + std::to_string(pos_));
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Compiled tape

namespace {

void flatten(const Expr::Node& n, std::vector<std::tuple<Expr::Kind, double, int>>& out) {
    if (n.a) flatten(*n.a, out);
    if (n.b) flatten(*n.b, out);
    int arg = 0;
    if (n.kind == Expr::Kind::Variable) arg = n.var;
    if (n.kind == Expr::Kind::IntPow) arg = n.exponent;
    out.emplace_back(n.kind, n.value, arg);
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e) {
    std::vector<std::tuple<Expr::Kind, double, int>> flat;
    flatten(e.node(), flat);
    ops_.reserve(flat.size());
    int depth = 0;
    for (const auto& [kind, value, arg] : flat) {
        switch (kind) {
            case Expr::Kind::Constant:
            case Expr::Kind::Variable: ++depth; break;
            case Expr::Kind::Add:
            case Expr::Kind::Sub:
            case Expr::Kind::Mul:
            case Expr::Kind::Div: --depth; break;
            default: break;  // unary ops keep the stack depth
        }
        max_stack_ = std::max(max_stack_, depth);
        ops_.push_back(Op{kind, value, arg});
    }
    max_var_ = e.min_dimension() - 1;
}

double CompiledExpr::eval(std::span<const double> x) const {
    double fixed[256];
    std::vector<double> heap;
    double* stack = fixed;
    if (max_stack_ > 256) {
        heap.resize(static_cast<std::size_t>(max_stack_));
        stack = heap.data();
    }
    int top = -1;
    for (const Op& op : ops_) {
        switch (op.kind) {
            case Expr::Kind::Constant: stack[++top] = op.value; break;
            case Expr::Kind::Variable: stack[++top] = x[static_cast<std::size_t>(op.arg)]; break;
            case Expr::Kind::Add: --top; stack[top] += stack[top + 1]; break;
            case Expr::Kind::Sub: --top; stack[top] -= stack[top + 1]; break;
            case Expr::Kind::Mul: --top; stack[top] *= stack[top + 1]; break;
            case Expr::Kind::Div: --top; stack[top] /= stack[top + 1]; break;
            case Expr::Kind::Neg: stack[top] = -stack[top]; break;
            case Expr::Kind::IntPow: stack[top] = ipow_value(stack[top], op.arg); break;
            case Expr::Kind::Sin: stack[top] = std::sin(stack[top]); break;
            case Expr::Kind::Cos: stack[top] = std::cos(stack[top]); break;
            case Expr::Kind::Exp: stack[top] = std::exp(stack[top]); break;
            case Expr::Kind::Sqrt: stack[top] = std::sqrt(stack[top]); break;
        }
    }
    return stack[0];
}

}  // namespace qbnb
