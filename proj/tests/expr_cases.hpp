#pragma once

// Shared expression fixtures: a fixed round-trip corpus and a random
// expression generator that stays finite on [0.2, 1.5].

#include <qes/expr.hpp>

#include "generators.hpp"

#include <string>
#include <vector>

namespace qes::prop {

inline const ParamMap& corpus_params()
{
    static const ParamMap p{{"a", 2.0}, {"c", 1.5}, {"m0", 0.7}, {"k", -0.25}};
    return p;
}

inline const std::vector<std::string>& round_trip_corpus()
{
    static const std::vector<std::string> cases = {
        "1",
        "x",
        "a",
        "-x",
        "-2",
        "2.5e-3",
        "1e10",
        "x + 1",
        "x - 1",
        "x*2",
        "x/2",
        "x^2",
        "x^-2",
        "x^0.5",
        "-x^2",
        "(-x)^2",
        "x^2^3",
        "(x^2)^3",
        "a - (x - 1)",
        "a - x - 1",
        "a/(x/2)",
        "a/x/2",
        "a*(x + 1)",
        "-(x + 1)",
        "--x",
        "-(-2)",
        "2 - -3",
        "x*-2",
        "x/-a",
        "exp(x)",
        "ln(1 + x^2)",
        "sqrt(x^2 + a)",
        "sin(x)*cos(x)",
        "exp(-x^2/2)",
        "((a + x^2)/(1 + x^2))^2",
        "c*x^2",
        "m0",
        "m0*(1 + k*x)",
        "1/(1 + exp(-x))",
        "x^(1/3)",
        "(1 + x)^(a - 1)",
        "sqrt(sqrt(x + 2))",
        "cos(sin(x))^2",
        "exp(ln(x + 3))",
        "-exp(x)*-x",
        "(x + 1)*(x - 1)/(x^2 + 1)",
        "3*x^4 - 2*x^3 + x - 7",
        "  x   +\t2 ",
        "0.5*(1 + cos(x))",
        "a^x",
    };
    return cases;
}

class ExprGen
{
public:
    explicit ExprGen(Gen& g) : g_(g) {}

    Expr make(int depth)
    {
        using namespace expr;
        if (depth <= 0 || g_.integer(0, 4) == 0) {
            switch (g_.integer(0, 2)) {
            case 0: return variable();
            case 1: return number(std::round(g_.uniform(0.5, 3.0) * 100.0) / 100.0);
            default: return param("a", corpus_params().at("a"));
            }
        }
        const Expr l = make(depth - 1);
        switch (g_.integer(0, 10)) {
        case 0: return binary(NodeKind::Add, l, make(depth - 1));
        case 1: return binary(NodeKind::Sub, l, make(depth - 1));
        case 2: return binary(NodeKind::Mul, l, make(depth - 1));
        case 3: return binary(NodeKind::Div, l, positive(make(depth - 1)));
        case 4: return binary(NodeKind::Pow, positive(l), number(static_cast<double>(g_.integer(-2, 3))));
        case 5: return unary(NodeKind::Neg, l);
        case 6: return unary(NodeKind::Exp, unary(NodeKind::Sin, l));
        case 7: return unary(NodeKind::Ln, positive(l));
        case 8: return unary(NodeKind::Sqrt, positive(l));
        case 9: return unary(NodeKind::Sin, l);
        default: return unary(NodeKind::Cos, l);
        }
    }

private:
    // 1 + e^2 keeps logs, roots and denominators away from zero
    static Expr positive(const Expr& e)
    {
        using namespace expr;
        return binary(NodeKind::Add, number(1.0), binary(NodeKind::Pow, e, number(2.0)));
    }

    Gen& g_;
};

} // namespace qes::prop
