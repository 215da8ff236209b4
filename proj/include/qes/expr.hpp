#pragma once

// Expression trees for mass profiles m(x): a small recursive-descent parser,
// a structure-preserving printer, and exact symbolic differentiation in x.
//
// Grammar (whitespace insignificant):
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | factor
//   factor := base ("^" unary)?            right-associative
//   base   := number | ident | "(" expr ")" | func "(" expr ")"
//   func   := exp | ln | sqrt | sin | cos
// `^` binds tighter than unary minus, so -x^2 is -(x^2). A minus sign written
// directly in front of a numeric literal is folded into the literal.

#include <qes/error.hpp>
#include <qes/numeric.hpp>

#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

namespace qes {

using ParamMap = std::map<std::string, double>;

enum class NodeKind
{
    Number,
    Variable,
    Param,
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode
{
    NodeKind kind;
    double value = 0.0; ///< literal value, or bound value of a parameter
    std::string name;   ///< parameter name
    Expr lhs;           ///< operand of unary nodes, left operand of binary nodes
    Expr rhs;
};

inline bool is_unary(NodeKind k) { return k >= NodeKind::Neg && k <= NodeKind::Cos; }
inline bool is_binary(NodeKind k) { return k >= NodeKind::Add; }

class ParseError : public Error
{
public:
    ParseError(const std::string& message, std::size_t offset, std::set<std::string> expected)
        : Error("parse", message + " at offset " + std::to_string(offset) + describe(expected)), offset_(offset),
          expected_(std::move(expected))
    {
    }

    std::size_t offset() const noexcept { return offset_; }
    const std::set<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string describe(const std::set<std::string>& e)
    {
        if (e.empty()) return {};
        std::string s = " (expected one of:";
        for (const auto& t : e) s += " " + t;
        return s + ")";
    }

    std::size_t offset_;
    std::set<std::string> expected_;
};

namespace expr {

inline Expr number(double v) { return std::make_shared<const ExprNode>(ExprNode{NodeKind::Number, v, {}, {}, {}}); }
inline Expr variable() { return std::make_shared<const ExprNode>(ExprNode{NodeKind::Variable, 0.0, {}, {}, {}}); }
inline Expr param(std::string name, double v)
{
    return std::make_shared<const ExprNode>(ExprNode{NodeKind::Param, v, std::move(name), {}, {}});
}
inline Expr unary(NodeKind k, Expr a) { return std::make_shared<const ExprNode>(ExprNode{k, 0.0, {}, std::move(a), {}}); }
inline Expr binary(NodeKind k, Expr a, Expr b)
{
    return std::make_shared<const ExprNode>(ExprNode{k, 0.0, {}, std::move(a), std::move(b)});
}

inline bool is_number(const Expr& e, double v) { return e->kind == NodeKind::Number && e->value == v; }
inline bool is_number(const Expr& e) { return e->kind == NodeKind::Number; }

/// True when the tree does not contain x.
inline bool is_constant(const Expr& e)
{
    switch (e->kind) {
    case NodeKind::Number:
    case NodeKind::Param: return true;
    case NodeKind::Variable: return false;
    default: return is_constant(e->lhs) && (!e->rhs || is_constant(e->rhs));
    }
}

inline double evaluate(const Expr& e, double x)
{
    switch (e->kind) {
    case NodeKind::Number:
    case NodeKind::Param: return e->value;
    case NodeKind::Variable: return x;
    case NodeKind::Neg: return -evaluate(e->lhs, x);
    case NodeKind::Exp: return std::exp(evaluate(e->lhs, x));
    case NodeKind::Ln: return std::log(evaluate(e->lhs, x));
    case NodeKind::Sqrt: return std::sqrt(evaluate(e->lhs, x));
    case NodeKind::Sin: return std::sin(evaluate(e->lhs, x));
    case NodeKind::Cos: return std::cos(evaluate(e->lhs, x));
    case NodeKind::Add: return evaluate(e->lhs, x) + evaluate(e->rhs, x);
    case NodeKind::Sub: return evaluate(e->lhs, x) - evaluate(e->rhs, x);
    case NodeKind::Mul: return evaluate(e->lhs, x) * evaluate(e->rhs, x);
    case NodeKind::Div: return evaluate(e->lhs, x) / evaluate(e->rhs, x);
    case NodeKind::Pow: {
        const double base = evaluate(e->lhs, x);
        if (is_number(e->rhs, 2.0)) return base * base;
        return std::pow(base, evaluate(e->rhs, x));
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Structural equality; parameters compare by name and bound value.
inline bool equal(const Expr& a, const Expr& b)
{
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case NodeKind::Number: return a->value == b->value;
    case NodeKind::Variable: return true;
    case NodeKind::Param: return a->name == b->name && a->value == b->value;
    default:
        if (!equal(a->lhs, b->lhs)) return false;
        return !a->rhs || equal(a->rhs, b->rhs);
    }
}

inline std::size_t node_count(const Expr& e)
{
    std::size_t n = 1;
    if (e->lhs) n += node_count(e->lhs);
    if (e->rhs) n += node_count(e->rhs);
    return n;
}

// --- folding constructors -------------------------------------------------

inline Expr neg(Expr a)
{
    if (is_number(a)) return number(-a->value);
    if (a->kind == NodeKind::Neg) return a->lhs;
    return unary(NodeKind::Neg, std::move(a));
}

inline Expr add(Expr a, Expr b)
{
    if (is_number(a) && is_number(b)) return number(a->value + b->value);
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return binary(NodeKind::Add, std::move(a), std::move(b));
}

inline Expr sub(Expr a, Expr b)
{
    if (is_number(a) && is_number(b)) return number(a->value - b->value);
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return neg(std::move(b));
    return binary(NodeKind::Sub, std::move(a), std::move(b));
}

inline Expr mul(Expr a, Expr b)
{
    if (is_number(a) && is_number(b)) return number(a->value * b->value);
    if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    if (is_number(a, -1.0)) return neg(std::move(b));
    if (is_number(b, -1.0)) return neg(std::move(a));
    return binary(NodeKind::Mul, std::move(a), std::move(b));
}

inline Expr div(Expr a, Expr b)
{
    if (is_number(a) && is_number(b) && b->value != 0.0) return number(a->value / b->value);
    if (is_number(a, 0.0)) return number(0.0);
    if (is_number(b, 1.0)) return a;
    return binary(NodeKind::Div, std::move(a), std::move(b));
}

inline Expr pow(Expr a, Expr b)
{
    if (is_number(b, 0.0)) return number(1.0);
    if (is_number(b, 1.0)) return a;
    if (is_number(a) && is_number(b)) return number(std::pow(a->value, b->value));
    return binary(NodeKind::Pow, std::move(a), std::move(b));
}

inline Expr func(NodeKind k, Expr a)
{
    if (is_number(a)) return number(evaluate(unary(k, a), 0.0));
    return unary(k, std::move(a));
}

// --- differentiation ------------------------------------------------------

/// Exact derivative with respect to x. Parameters are constants.
inline Expr differentiate(const Expr& e)
{
    switch (e->kind) {
    case NodeKind::Number:
    case NodeKind::Param: return number(0.0);
    case NodeKind::Variable: return number(1.0);
    case NodeKind::Neg: return neg(differentiate(e->lhs));
    case NodeKind::Exp: return mul(e, differentiate(e->lhs));
    case NodeKind::Ln: return div(differentiate(e->lhs), e->lhs);
    case NodeKind::Sqrt: return div(differentiate(e->lhs), mul(number(2.0), e));
    case NodeKind::Sin: return mul(func(NodeKind::Cos, e->lhs), differentiate(e->lhs));
    case NodeKind::Cos: return neg(mul(func(NodeKind::Sin, e->lhs), differentiate(e->lhs)));
    case NodeKind::Add: return add(differentiate(e->lhs), differentiate(e->rhs));
    case NodeKind::Sub: return sub(differentiate(e->lhs), differentiate(e->rhs));
    case NodeKind::Mul:
        return add(mul(differentiate(e->lhs), e->rhs), mul(e->lhs, differentiate(e->rhs)));
    case NodeKind::Div:
        return div(sub(mul(differentiate(e->lhs), e->rhs), mul(e->lhs, differentiate(e->rhs))),
                   pow(e->rhs, number(2.0)));
    case NodeKind::Pow: {
        const Expr& base = e->lhs;
        const Expr& expo = e->rhs;
        if (is_constant(expo)) {
            // d(a^c) = c a^(c-1) a'
            const Expr reduced = is_number(expo) ? number(expo->value - 1.0) : sub(expo, number(1.0));
            return mul(mul(expo, pow(base, reduced)), differentiate(base));
        }
        // d(a^b) = a^b (b' ln a + b a' / a)
        return mul(e, add(mul(differentiate(expo), func(NodeKind::Ln, base)),
                          div(mul(expo, differentiate(base)), base)));
    }
    }
    throw InvalidArgument("malformed expression node");
}

// --- printing -------------------------------------------------------------

namespace detail {

inline int precedence(const Expr& e)
{
    switch (e->kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Number: return e->value < 0.0 || std::signbit(e->value) ? 3 : 5;
    case NodeKind::Pow: return 4;
    default: return 5;
    }
}

inline const char* function_name(NodeKind k)
{
    switch (k) {
    case NodeKind::Exp: return "exp";
    case NodeKind::Ln: return "ln";
    case NodeKind::Sqrt: return "sqrt";
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    default: return "";
    }
}

inline std::string paren(const std::string& s, bool wrap) { return wrap ? "(" + s + ")" : s; }

} // namespace detail

/// Text that parses back to a structurally identical tree.
inline std::string to_string(const Expr& e)
{
    using detail::paren;
    using detail::precedence;
    switch (e->kind) {
    case NodeKind::Number: return format_double(e->value);
    case NodeKind::Variable: return "x";
    case NodeKind::Param: return e->name;
    case NodeKind::Neg:
        // a bare literal after '-' would be folded back into the literal
        return "-" + paren(to_string(e->lhs), precedence(e->lhs) < 3 || is_number(e->lhs));
    case NodeKind::Exp:
    case NodeKind::Ln:
    case NodeKind::Sqrt:
    case NodeKind::Sin:
    case NodeKind::Cos: return std::string(detail::function_name(e->kind)) + "(" + to_string(e->lhs) + ")";
    case NodeKind::Pow:
        return paren(to_string(e->lhs), precedence(e->lhs) <= 4) + "^" +
               paren(to_string(e->rhs), precedence(e->rhs) < 3);
    default: {
        const int p = precedence(e);
        const char* op = e->kind == NodeKind::Add ? " + " : e->kind == NodeKind::Sub ? " - "
                         : e->kind == NodeKind::Mul ? "*"
                                                    : "/";
        return paren(to_string(e->lhs), precedence(e->lhs) < p) + op + paren(to_string(e->rhs), precedence(e->rhs) <= p);
    }
    }
}

// --- parsing --------------------------------------------------------------

class Parser
{
public:
    Parser(std::string_view text, const ParamMap& params) : text_(text), params_(params) {}

    Expr parse()
    {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'", {"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected) const
    {
        throw ParseError(msg, pos_, std::move(expected));
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool peek(char c)
    {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c)
    {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    bool at_number()
    {
        skip_ws();
        if (pos_ >= text_.size()) return false;
        const char c = text_[pos_];
        return is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]));
    }

    Expr parse_expr()
    {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = binary(NodeKind::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = binary(NodeKind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    Expr parse_term()
    {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = binary(NodeKind::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = binary(NodeKind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    Expr parse_unary()
    {
        if (accept('-')) {
            const bool literal = at_number();
            Expr operand = parse_unary();
            if (literal && operand->kind == NodeKind::Number) return number(-operand->value);
            return unary(NodeKind::Neg, operand);
        }
        return parse_factor();
    }

    Expr parse_factor()
    {
        Expr base = parse_base();
        if (accept('^')) return binary(NodeKind::Pow, base, parse_unary());
        return base;
    }

    Expr parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
                pos_ = start;
                fail("malformed number", {"digit after exponent"});
            }
            while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        }
        double v = 0.0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || !std::isfinite(v)) {
            pos_ = start;
            fail("malformed number", {"number"});
        }
        if (pos_ < text_.size() && is_ident_start(text_[pos_])) fail("malformed number", {"operator"});
        return number(v);
    }

    Expr parse_base()
    {
        skip_ws();
        const std::set<std::string> expected{"number", "identifier", "(", "-"};
        if (pos_ >= text_.size()) fail("unexpected end of input", expected);
        if (at_number()) return parse_number();
        if (accept('(')) {
            Expr inner = parse_expr();
            if (!accept(')')) fail("unbalanced parenthesis", {")"});
            return inner;
        }
        if (is_ident_start(text_[pos_])) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
            const std::string ident(text_.substr(start, pos_ - start));
            static const std::map<std::string, NodeKind> funcs{{"exp", NodeKind::Exp},
                                                               {"ln", NodeKind::Ln},
                                                               {"sqrt", NodeKind::Sqrt},
                                                               {"sin", NodeKind::Sin},
                                                               {"cos", NodeKind::Cos}};
            if (auto it = funcs.find(ident); it != funcs.end()) {
                if (!accept('(')) fail("function '" + ident + "' needs an argument", {"("});
                Expr arg = parse_expr();
                if (!accept(')')) fail("unbalanced parenthesis", {")"});
                return unary(it->second, arg);
            }
            if (ident == "x") return variable();
            if (auto it = params_.find(ident); it != params_.end()) return param(ident, it->second);
            pos_ = start;
            fail("unknown identifier '" + ident + "'", {"x", "declared parameter", "exp", "ln", "sqrt", "sin", "cos"});
        }
        fail("unexpected character '" + std::string(1, text_[pos_]) + "'", expected);
    }

    std::string_view text_;
    const ParamMap& params_;
    std::size_t pos_ = 0;
};

inline Expr parse(std::string_view text, const ParamMap& params = {}) { return Parser(text, params).parse(); }

} // namespace expr

/// Parses a mass expression; unknown identifiers that are not parameters fail.
inline Expr parse_mass(std::string_view text, const ParamMap& params = {}) { return expr::parse(text, params); }

inline Expr differentiate(const Expr& e) { return expr::differentiate(e); }

} // namespace qes
