#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qbnb/geometry.hpp"
#include "qbnb/interval.hpp"

namespace qbnb {

// Immutable expression tree over real variables x1..xd.
//
// Construction goes through smart constructors that apply a conservative
// simplification pass: constant folding plus 0/1 elimination. That is enough
// to keep symbolically differentiated trees (notably third derivatives of
// polynomial products) from exploding with dead branches, without risking a
// rewrite that changes the function.
class Expr {
  public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, IntPow, Sin, Cos, Exp, Sqrt };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        Kind kind;
        double value = 0.0;  // Constant
        int var = -1;        // Variable index, 0-based
        int exponent = 0;    // IntPow
        int max_var = -1;    // largest variable index in the subtree
        NodePtr a;
        NodePtr b;
    };

    Expr() : node_(constant(0.0).node_) {}

    static Expr constant(double v);
    static Expr variable(int index);  // 0-based

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

    static Expr int_pow(const Expr& a, int n);  // n >= 0
    static Expr sin(const Expr& a);
    static Expr cos(const Expr& a);
    static Expr exp(const Expr& a);
    static Expr sqrt(const Expr& a);

    Kind kind() const { return node_->kind; }
    bool is_constant() const { return node_->kind == Kind::Constant; }
    bool is_constant(double v) const { return is_constant() && node_->value == v; }
    double constant_value() const { return node_->value; }
    // Number of variables the expression mentions, i.e. 1 + largest index.
    int min_dimension() const { return node_->max_var + 1; }
    const Node& node() const { return *node_; }

    double eval(std::span<const double> x) const;
    double eval(const std::vector<double>& x) const { return eval(std::span<const double>(x)); }

    // Sound range enclosure over the box; throws DomainError on division by
    // an interval containing zero or sqrt of an interval dipping below zero.
    Interval eval_interval(const Box& domain) const;

    // Partial derivative with respect to variable i, as a new tree.
    Expr differentiate(int i) const;

    std::string str() const;

    size_t node_count() const;

  private:
    explicit Expr(NodePtr n) : node_(std::move(n)) {}
    static Expr make(Kind k, double value, int var, int exponent, NodePtr a, NodePtr b);

    NodePtr node_;
};

// Parses the infix grammar used by the bounds command: floating literals,
// variables x1..xd, + - * /, integer powers a^n, sin/cos/exp/sqrt, and
// parentheses. Throws ParseError with a position message.
Expr parse_expr(const std::string& text);

// Expression flattened to a postfix tape for cheap repeated evaluation.
// Evaluation allocates nothing for tapes whose stack stays within a fixed
// budget, so it is safe and fast to call from concurrent workers.
class CompiledExpr {
  public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);

    double eval(std::span<const double> x) const;
    double eval(const std::vector<double>& x) const { return eval(std::span<const double>(x)); }

    int min_dimension() const { return max_var_ + 1; }
    bool empty() const { return ops_.empty(); }

  private:
    struct Op {
        Expr::Kind kind;
        double value;  // Constant
        int arg;       // Variable index or IntPow exponent
    };
    std::vector<Op> ops_;
    int max_stack_ = 0;
    int max_var_ = -1;
};

}  // namespace qbnb
