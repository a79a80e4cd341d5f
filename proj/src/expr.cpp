#include "wfk/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <system_error>

namespace wfk {

struct Expr::Node {
    Kind kind = Kind::constant;
    double value = 0.0;
    int index = 0;  // variable index or power exponent
    Span span;
    std::vector<Expr> children;
};

namespace {

constexpr int kMaxDepth = 200;
constexpr int kMaxExponent = 1000;

bool is_function(Expr::Kind k) {
    return k == Expr::Kind::exp || k == Expr::Kind::sqrt || k == Expr::Kind::log;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value, Span span) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = value;
    n->span = span;
    return Expr(std::move(n));
}

Expr Expr::variable(int index, Span span) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->index = index;
    n->span = span;
    return Expr(std::move(n));
}

Expr Expr::unary(Kind kind, Expr operand, Span span) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->span = span;
    n->children.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs, Span span) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->span = span;
    n->children.push_back(std::move(lhs));
    n->children.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent, Span span) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::power;
    n->index = exponent;
    n->span = span;
    n->children.push_back(std::move(base));
    return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
Span Expr::span() const { return node_->span; }
const std::vector<Expr>& Expr::children() const { return node_->children; }

int Expr::max_variable_index() const {
    int best = kind() == Kind::variable ? variable_index() : -1;
    for (const auto& c : children()) best = std::max(best, c.max_variable_index());
    return best;
}

// ---------------------------------------------------------------------------
// Folding builders

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return Expr::binary(Expr::Kind::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return Expr::binary(Expr::Kind::subtract, a, b);
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.kind() == Expr::Kind::negate) return a.children()[0];
    return Expr::unary(Expr::Kind::negate, a);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return Expr::binary(Expr::Kind::multiply, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0) {
        return Expr::constant(a.constant_value() / b.constant_value());
    }
    if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
    if (b.is_constant(1.0)) return a;
    return Expr::binary(Expr::Kind::divide, a, b);
}

Expr exp(const Expr& a) {
    if (a.is_constant(0.0)) return Expr::constant(1.0);
    return Expr::unary(Expr::Kind::exp, a);
}

Expr sqrt(const Expr& a) {
    if (a.is_constant(1.0)) return a;
    return Expr::unary(Expr::Kind::sqrt, a);
}

Expr log(const Expr& a) {
    if (a.is_constant(1.0)) return Expr::constant(0.0);
    return Expr::unary(Expr::Kind::log, a);
}

Expr pow(const Expr& a, int exponent) {
    if (exponent == 0) return Expr::constant(1.0);
    if (exponent == 1) return a;
    if (a.is_constant()) return Expr::constant(std::pow(a.constant_value(), exponent));
    return Expr::power(a, exponent);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

    Expr run() {
        skip_space();
        if (at_end()) fail(ParseError::Kind::syntax, {0, text_.size()}, "empty expression");
        Expr e = parse_sum();
        skip_space();
        if (!at_end()) {
            fail(ParseError::Kind::syntax, {pos_, pos_ + 1},
                 std::string("unexpected '") + text_[pos_] + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(ParseError::Kind kind, Span span, const std::string& what) const {
        std::ostringstream os;
        os << what << " at " << span.begin + 1 << ".." << span.end;
        throw ParseError(kind, span, os.str());
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_space() {
        while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p(p) {
            if (++p.depth_ > kMaxDepth) {
                p.fail(ParseError::Kind::syntax, {p.pos_, p.pos_ + 1}, "expression nested too deeply");
            }
        }
        ~DepthGuard() { --p.depth_; }
        Parser& p;
    };

    Expr parse_sum() {
        DepthGuard guard(*this);
        Expr lhs = parse_term();
        for (;;) {
            skip_space();
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            Expr rhs = parse_term();
            lhs = Expr::binary(c == '+' ? Expr::Kind::add : Expr::Kind::subtract, lhs, rhs,
                               {lhs.span().begin, rhs.span().end});
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            skip_space();
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            Expr rhs = parse_unary();
            lhs = Expr::binary(c == '*' ? Expr::Kind::multiply : Expr::Kind::divide, lhs, rhs,
                               {lhs.span().begin, rhs.span().end});
        }
    }

    Expr parse_unary() {
        DepthGuard guard(*this);
        skip_space();
        if (peek() == '-') {
            const std::size_t start = pos_++;
            Expr operand = parse_unary();
            return Expr::unary(Expr::Kind::negate, operand, {start, operand.span().end});
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        skip_space();
        if (peek() != '^') return base;
        const std::size_t caret = pos_++;
        skip_space();
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) {
            fail(ParseError::Kind::syntax, {caret, caret + 1},
                 "exponent must be a non-negative integer literal");
        }
        int exponent = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
        if (ec != std::errc() || exponent > kMaxExponent) {
            fail(ParseError::Kind::syntax, {start, pos_}, "exponent too large");
        }
        (void)ptr;
        skip_space();
        if (peek() == '^') {
            fail(ParseError::Kind::syntax, {pos_, pos_ + 1}, "chained exponents need parentheses");
        }
        return Expr::power(base, exponent, {base.span().begin, pos_});
    }

    Expr parse_primary() {
        skip_space();
        if (at_end()) fail(ParseError::Kind::syntax, {pos_, pos_}, "unexpected end of expression");
        const char c = peek();
        const std::size_t start = pos_;
        if (c == '(') {
            ++pos_;
            Expr inner = parse_sum();
            expect_close(start);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) {
            fail(ParseError::Kind::syntax, {pos_, pos_ + 1}, "non-printable character");
        }
        fail(ParseError::Kind::syntax, {pos_, pos_ + 1}, std::string("unexpected '") + c + "'");
    }

    void expect_close(std::size_t open) {
        skip_space();
        if (peek() != ')') {
            fail(ParseError::Kind::syntax, {open, pos_}, "missing ')'");
        }
        ++pos_;
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            return pos_ - s;
        };
        std::size_t count = digits();
        if (peek() == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) fail(ParseError::Kind::syntax, {start, pos_}, "malformed number");
        if (peek() == 'e' || peek() == 'E') {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                digits();
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
            fail(ParseError::Kind::syntax, {start, pos_}, "malformed number");
        }
        return Expr::constant(value, {start, pos_});
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        const Span span{start, pos_};

        Expr::Kind fn = Expr::Kind::constant;
        if (name == "exp") fn = Expr::Kind::exp;
        if (name == "sqrt") fn = Expr::Kind::sqrt;
        if (name == "log") fn = Expr::Kind::log;
        if (is_function(fn)) {
            skip_space();
            if (peek() != '(') {
                fail(ParseError::Kind::syntax, span, "function '" + std::string(name) + "' needs '('");
            }
            const std::size_t open = pos_++;
            Expr arg = parse_sum();
            expect_close(open);
            return Expr::unary(fn, arg, {start, pos_});
        }

        if (name.size() >= 2 && name[0] == 'x') {
            bool all_digits = true;
            for (char ch : name.substr(1)) all_digits = all_digits && std::isdigit(static_cast<unsigned char>(ch));
            if (all_digits) {
                int index = 0;
                auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
                (void)ptr;
                if (ec != std::errc() || index < 1 || index > dim_) {
                    fail(ParseError::Kind::index_out_of_range, span,
                         "coordinate '" + std::string(name) + "' outside x1..x" + std::to_string(dim_));
                }
                return Expr::variable(index - 1, span);
            }
        }
        fail(ParseError::Kind::unknown_identifier, span, "unknown identifier \"" + std::string(name) + "\"");
    }

    std::string_view text_;
    int dim_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, int dim) { return Parser(text, dim).run(); }

std::string caret_line(std::string_view text, Span span) {
    std::string out(text);
    out += '\n';
    out.append(std::min(span.begin, text.size()), ' ');
    const std::size_t width = span.end > span.begin ? span.end - span.begin : 1;
    out.append(width, '^');
    return out;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::add:
        case Expr::Kind::subtract: return 1;
        case Expr::Kind::multiply:
        case Expr::Kind::divide: return 2;
        case Expr::Kind::negate: return 3;
        case Expr::Kind::power: return 4;
        case Expr::Kind::constant: return e.constant_value() < 0 || std::signbit(e.constant_value()) ? 3 : 5;
        default: return 5;
    }
}

std::string number_text(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void print(const Expr& e, int min_prec, std::string& out) {
    const bool wrap = precedence(e) < min_prec;
    if (wrap) out += '(';
    const auto& ch = e.children();
    switch (e.kind()) {
        case Expr::Kind::constant: {
            const double v = e.constant_value();
            if (std::signbit(v)) {
                out += '-';
                out += number_text(-v);
            } else {
                out += number_text(v);
            }
            break;
        }
        case Expr::Kind::variable:
            out += 'x';
            out += std::to_string(e.variable_index() + 1);
            break;
        case Expr::Kind::negate:
            out += '-';
            print(ch[0], 3, out);
            break;
        case Expr::Kind::add:
        case Expr::Kind::subtract:
            print(ch[0], 1, out);
            out += e.kind() == Expr::Kind::add ? '+' : '-';
            print(ch[1], 2, out);
            break;
        case Expr::Kind::multiply:
        case Expr::Kind::divide:
            print(ch[0], 2, out);
            out += e.kind() == Expr::Kind::multiply ? '*' : '/';
            print(ch[1], 3, out);
            break;
        case Expr::Kind::power:
            print(ch[0], 5, out);
            out += '^';
            out += std::to_string(e.exponent());
            break;
        case Expr::Kind::exp:
        case Expr::Kind::sqrt:
        case Expr::Kind::log:
            out += e.kind() == Expr::Kind::exp ? "exp(" : e.kind() == Expr::Kind::sqrt ? "sqrt(" : "log(";
            print(ch[0], 0, out);
            out += ')';
            break;
    }
    if (wrap) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void check_finite(double v, const Expr& e) {
    if (!std::isfinite(v)) throw DomainError(e.span(), "non-finite value in expression");
}

double eval_value(const Expr& e, std::span<const double> p) {
    const auto& ch = e.children();
    double v = 0.0;
    switch (e.kind()) {
        case Expr::Kind::constant: return e.constant_value();
        case Expr::Kind::variable:
            if (static_cast<std::size_t>(e.variable_index()) >= p.size()) {
                throw DomainError(e.span(), "coordinate x" + std::to_string(e.variable_index() + 1) +
                                                " outside a " + std::to_string(p.size()) + "-dimensional point");
            }
            return p[static_cast<std::size_t>(e.variable_index())];
        case Expr::Kind::negate: return -eval_value(ch[0], p);
        case Expr::Kind::add: v = eval_value(ch[0], p) + eval_value(ch[1], p); break;
        case Expr::Kind::subtract: v = eval_value(ch[0], p) - eval_value(ch[1], p); break;
        case Expr::Kind::multiply: v = eval_value(ch[0], p) * eval_value(ch[1], p); break;
        case Expr::Kind::divide: {
            const double den = eval_value(ch[1], p);
            if (den == 0.0) throw DomainError(e.span(), "division by zero");
            v = eval_value(ch[0], p) / den;
            break;
        }
        case Expr::Kind::power: v = std::pow(eval_value(ch[0], p), e.exponent()); break;
        case Expr::Kind::exp: v = std::exp(eval_value(ch[0], p)); break;
        case Expr::Kind::sqrt: {
            const double u = eval_value(ch[0], p);
            if (!(u > 0.0)) throw DomainError(e.span(), "sqrt of non-positive value");
            v = std::sqrt(u);
            break;
        }
        case Expr::Kind::log: {
            const double u = eval_value(ch[0], p);
            if (!(u > 0.0)) throw DomainError(e.span(), "log of non-positive value");
            v = std::log(u);
            break;
        }
    }
    check_finite(v, e);
    return v;
}

ScalarJet eval_jet(const Expr& e, std::span<const double> p) {
    const int n = static_cast<int>(p.size());
    const auto& ch = e.children();
    ScalarJet out;
    switch (e.kind()) {
        case Expr::Kind::constant: return ScalarJet(n, e.constant_value());
        case Expr::Kind::variable: {
            const double x = eval_value(e, p);
            return ScalarJet::coordinate(n, e.variable_index(), x);
        }
        case Expr::Kind::negate: return -eval_jet(ch[0], p);
        case Expr::Kind::add: out = eval_jet(ch[0], p) + eval_jet(ch[1], p); break;
        case Expr::Kind::subtract: out = eval_jet(ch[0], p) - eval_jet(ch[1], p); break;
        case Expr::Kind::multiply: out = eval_jet(ch[0], p) * eval_jet(ch[1], p); break;
        case Expr::Kind::divide: {
            ScalarJet den = eval_jet(ch[1], p);
            if (den.value() == 0.0) throw DomainError(e.span(), "division by zero");
            out = eval_jet(ch[0], p) * reciprocal(den);
            break;
        }
        case Expr::Kind::power: out = pow(eval_jet(ch[0], p), e.exponent()); break;
        case Expr::Kind::exp: out = exp(eval_jet(ch[0], p)); break;
        case Expr::Kind::sqrt: {
            ScalarJet u = eval_jet(ch[0], p);
            if (!(u.value() > 0.0)) throw DomainError(e.span(), "sqrt of non-positive value");
            out = sqrt(u);
            break;
        }
        case Expr::Kind::log: {
            ScalarJet u = eval_jet(ch[0], p);
            if (!(u.value() > 0.0)) throw DomainError(e.span(), "log of non-positive value");
            out = log(u);
            break;
        }
    }
    check_finite(out.value(), e);
    return out;
}

}  // namespace

double evaluate(const Expr& e, std::span<const double> point) { return eval_value(e, point); }

ScalarJet evaluate_jet(const Expr& e, std::span<const double> point) { return eval_jet(e, point); }

}  // namespace wfk
