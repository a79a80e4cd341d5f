#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfk/errors.hpp"
#include "wfk/jet.hpp"

namespace wfk {

// Closed-form scalar expression over chart coordinates x1..xN.
//
// Grammar (highest precedence first):
//
//   primary := number | 'x' digits | func '(' expr ')' | '(' expr ')'
//   power   := primary [ '^' integer ]
//   unary   := '-' unary | power
//   term    := unary { ('*' | '/') unary }
//   expr    := term { ('+' | '-') term }
//   func    := 'exp' | 'sqrt' | 'log'
//
// Exponents are non-negative integer literals; "-x1^2" reads as -(x1^2).
// Coordinates are 1-based in text and 0-based in the AST.
class Expr {
public:
    enum class Kind { constant, variable, negate, add, subtract, multiply, divide, power, exp, sqrt, log };

    // The constant 0.
    Expr();

    static Expr constant(double value, Span span = {});
    static Expr variable(int index, Span span = {});
    static Expr unary(Kind kind, Expr operand, Span span = {});
    static Expr binary(Kind kind, Expr lhs, Expr rhs, Span span = {});
    static Expr power(Expr base, int exponent, Span span = {});

    Kind kind() const;
    double constant_value() const;
    int variable_index() const;
    int exponent() const;
    Span span() const;
    const std::vector<Expr>& children() const;

    bool is_constant() const { return kind() == Kind::constant; }
    bool is_constant(double v) const { return is_constant() && constant_value() == v; }

    // Largest coordinate index used, or -1 for a coordinate-free expression.
    int max_variable_index() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Builders with constant folding of 0 and 1 and of constant-constant operands.
// The parser never uses these, so parsed trees keep their source shape.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr exp(const Expr& a);
Expr sqrt(const Expr& a);
Expr log(const Expr& a);
Expr pow(const Expr& a, int exponent);

Expr parse_expression(std::string_view text, int dim);

// Canonical text form; parse_expression(to_string(e)) reproduces the tree.
std::string to_string(const Expr& e);

double evaluate(const Expr& e, std::span<const double> point);
ScalarJet evaluate_jet(const Expr& e, std::span<const double> point);

// Renders an error location under the source line, e.g. "exp(x9)\n    ^^".
std::string caret_line(std::string_view text, Span span);

}  // namespace wfk
