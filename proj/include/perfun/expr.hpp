#pragma once

// Scalar expressions in one variable (t) or two (x, y).
//
// Grammar, loosest binding first:
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := ('-' | '+') unary | power
//   power := primary ('^' unary)?          exponent folds to an integer constant
//   primary := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//   func  := sin | cos | exp | ln | sqrt | sign
//
// So -x^2 parses as -(x^2) and 2^3^2 as 2^(3^2). Expressions are immutable and
// share structure, which makes copies cheap and concurrent evaluation safe.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "perfun/jet.hpp"
#include "perfun/vec2.hpp"

namespace perfun {

enum class Op { Const, Var, Neg, Sin, Cos, Exp, Ln, Sqrt, Sign, Add, Sub, Mul, Div, Pow };

struct ExprNode;
struct ExprAccess;

class Expr {
public:
    // The constant 0 of arity 2.
    Expr();

    static Expr constant(double value, int arity);
    static Expr variable(int index, int arity);

    int arity() const { return arity_; }
    Op op() const;
    bool isConstant() const { return op() == Op::Const; }
    double constantValue() const;
    int variableIndex() const;
    int exponent() const;
    // Operands; the second one only exists for binary operators.
    Expr operand(int k) const;

    double operator()(double t) const;
    double operator()(Point p) const;
    double eval(std::span<const double> vars) const;

    Jet1 jet1(double t0, int order) const;
    Jet2 jet2(Point p, int order) const;

    // Symbolic partial derivative with respect to variable `index`.
    // Throws EvalError when the expression contains sign().
    Expr derivative(int index) const;

    // Replaces variable i by variable mapping[i] of a new arity.
    Expr remap(int newArity, std::span<const int> mapping) const;

    // Infix text that parses back to an equivalent expression.
    std::string str() const;
    // Prefix form, e.g. add(pow(x, 2), pow(y, 2)).
    std::string structure() const;

    bool containsSign() const;
    std::size_t nodeCount() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, int n);
    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);
    friend Expr exp(const Expr& a);
    friend Expr ln(const Expr& a);
    friend Expr sqrt(const Expr& a);
    friend Expr sign(const Expr& a);

    friend Expr operator+(const Expr& a, double v) { return a + constant(v, a.arity_); }
    friend Expr operator+(double v, const Expr& a) { return constant(v, a.arity_) + a; }
    friend Expr operator-(const Expr& a, double v) { return a - constant(v, a.arity_); }
    friend Expr operator-(double v, const Expr& a) { return constant(v, a.arity_) - a; }
    friend Expr operator*(const Expr& a, double v) { return a * constant(v, a.arity_); }
    friend Expr operator*(double v, const Expr& a) { return constant(v, a.arity_) * a; }
    friend Expr operator/(const Expr& a, double v) { return a / constant(v, a.arity_); }
    friend Expr operator/(double v, const Expr& a) { return constant(v, a.arity_) / a; }

private:
    friend struct ExprAccess;
    Expr(std::shared_ptr<const ExprNode> node, int arity) : node_(std::move(node)), arity_(arity) {}
    static Expr make(Op op, Expr a, Expr b = {});

    std::shared_ptr<const ExprNode> node_;
    int arity_ = 2;
};

// Parses with the default variable names: "t" for arity 1, "x" and "y" for arity 2.
Expr parseExpression(std::string_view source, int arity);

// Parses with explicit variable names; names[i] becomes variable i.
Expr parseExpression(std::string_view source, const std::vector<std::string>& names);

}  // namespace perfun
