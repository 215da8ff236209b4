#pragma once

#include <qes/error.hpp>
#include <qes/expr.hpp>
#include <qes/numeric.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace qes {

struct Domain
{
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct MassValues
{
    double m;
    double dm;
    double d2m;
};

/// Positive effective mass m(x) with exact symbolic m' and m''.
class MassProfile
{
public:
    static constexpr std::size_t probe_points = 1024;

    /// Parses `text`, differentiates twice, and checks positivity on a
    /// uniform probe of the domain plus derivative consistency against
    /// central finite differences.
    static MassProfile from_text(std::string_view text, ParamMap params, Domain domain, std::string name = "custom")
    {
        Expr e = parse_mass(text, params);
        return MassProfile(std::move(e), std::string(text), std::move(params), domain, std::move(name));
    }

    /// Built-in profiles: "constant" (m0), "rational2" (((a + x^2)/(1 + x^2))^2)
    /// and "quadratic" (c x^2, domain must exclude x = 0).
    static MassProfile builtin(std::string_view name, ParamMap params, Domain domain)
    {
        std::string text;
        if (name == "constant") {
            params.emplace("m0", 1.0);
            text = "m0";
        } else if (name == "rational2") {
            params.emplace("a", 2.0);
            text = "((a + x^2)/(1 + x^2))^2";
        } else if (name == "quadratic") {
            params.emplace("c", 1.0);
            text = "c*x^2";
            if (domain.lo <= 0.0 && domain.hi >= 0.0)
                throw InvalidArgument("the quadratic mass vanishes at x = 0; choose a domain excluding it");
        } else {
            throw InvalidArgument("unknown built-in mass profile '" + std::string(name) + "'");
        }
        return from_text(text, std::move(params), domain, std::string(name));
    }

    static bool is_builtin(std::string_view name)
    {
        return name == "constant" || name == "rational2" || name == "quadratic";
    }

    const Expr& expr() const noexcept { return expr_; }
    const Expr& first_derivative() const noexcept { return d1_; }
    const Expr& second_derivative() const noexcept { return d2_; }
    const Domain& domain() const noexcept { return domain_; }
    const ParamMap& params() const noexcept { return params_; }
    const std::string& name() const noexcept { return name_; }
    const std::string& text() const noexcept { return text_; }

    /// True when m' and m'' fold to the literal 0.
    bool is_constant() const noexcept { return expr::is_number(d1_, 0.0) && expr::is_number(d2_, 0.0); }

    /// Unchecked evaluation (no domain or positivity test).
    double mass(double x) const { return expr::evaluate(expr_, x); }
    double mass_d1(double x) const { return expr::evaluate(d1_, x); }
    double mass_d2(double x) const { return expr::evaluate(d2_, x); }

    /// Same profile on another domain (re-validated).
    MassProfile with_domain(Domain d) const { return MassProfile(expr_, text_, params_, d, name_); }

private:
    MassProfile(Expr e, std::string text, ParamMap params, Domain domain, std::string name)
        : expr_(std::move(e)), text_(std::move(text)), params_(std::move(params)), domain_(domain), name_(std::move(name))
    {
        if (!(domain_.lo < domain_.hi) || !std::isfinite(domain_.lo) || !std::isfinite(domain_.hi))
            throw InvalidArgument("mass domain must be a finite interval with lo < hi");
        d1_ = differentiate(expr_);
        d2_ = differentiate(d1_);
        check_positive();
        check_derivatives();
    }

    void check_positive() const
    {
        const double h = (domain_.hi - domain_.lo) / static_cast<double>(probe_points - 1);
        for (std::size_t i = 0; i < probe_points; ++i) {
            const double x = domain_.lo + static_cast<double>(i) * h;
            const double m = mass(x);
            if (!std::isfinite(m) || m <= 0.0)
                throw InvalidArgument("mass '" + text_ + "' is not positive and finite at x = " + format_double(x) +
                                      " (m = " + format_double(m) + ")");
        }
    }

    void check_derivatives() const
    {
        constexpr int probes = 16;
        for (int i = 1; i < probes; ++i) {
            const double x = domain_.lo + (domain_.hi - domain_.lo) * i / probes;
            const double step = 1e-5 * std::max(1.0, std::abs(x));
            const double fd = (mass(x + step) - mass(x - step)) / (2.0 * step);
            const double d1 = mass_d1(x);
            const double scale = std::max({1.0, std::abs(fd), std::abs(mass(x))});
            if (!std::isfinite(d1) || std::abs(d1 - fd) > 1e-6 * scale)
                throw NumericalError("symbolic derivative of '" + text_ + "' disagrees with finite differences at x = " +
                                     format_double(x));
        }
    }

    Expr expr_;
    Expr d1_;
    Expr d2_;
    std::string text_;
    ParamMap params_;
    Domain domain_;
    std::string name_;
};

/// (m, m', m'') at x; throws outside the domain or where m <= 0.
inline MassValues eval_profile(const MassProfile& p, double x)
{
    if (!p.domain().contains(x))
        throw InvalidArgument("x = " + format_double(x) + " lies outside the mass domain [" +
                              format_double(p.domain().lo) + ", " + format_double(p.domain().hi) + "]");
    const MassValues v{p.mass(x), p.mass_d1(x), p.mass_d2(x)};
    if (!(v.m > 0.0) || !std::isfinite(v.m)) throw InvalidArgument("mass is not positive at x = " + format_double(x));
    if (!std::isfinite(v.dm) || !std::isfinite(v.d2m))
        throw NumericalError("mass derivatives are not finite at x = " + format_double(x));
    return v;
}

} // namespace qes
