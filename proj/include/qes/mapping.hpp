#pragma once

// Change of variables x -> u -> r, the weight function W and its integral,
// and assembly of the wavefunction
//   psi(x) = -(2 r / r'^2) m(x) exp(-Omega(x)) R(r(x)),   Omega' = W.

#include <qes/algebra.hpp>
#include <qes/error.hpp>
#include <qes/mass_profile.hpp>
#include <qes/numeric.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qes {

/// Uniform grid x_i = x_min + i h, i = 0 ... n-1.
struct Grid
{
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 16;

    static constexpr std::size_t min_points = 16;

    void validate() const
    {
        if (n < min_points) throw InvalidArgument("grid needs at least 16 points");
        if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
            throw InvalidArgument("grid needs finite x_min < x_max");
    }

    double h() const noexcept { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const noexcept { return i + 1 == n ? x_max : x_min + static_cast<double>(i) * h(); }
    Domain domain() const noexcept { return {x_min, x_max}; }

    /// Every other point; requires odd n.
    Grid coarse() const
    {
        if (n % 2 == 0) throw InvalidArgument("coarsening needs an odd point count");
        return {x_min, x_max, (n - 1) / 2 + 1};
    }
};

enum class Family
{
    Sextic,
    Coulomb,
    Morse,
    General,
};

inline std::string to_string(Family f)
{
    switch (f) {
    case Family::Sextic: return "sextic";
    case Family::Coulomb: return "coulomb";
    case Family::Morse: return "morse";
    case Family::General: return "general";
    }
    return "?";
}

inline Family family_from_string(const std::string& s)
{
    if (s == "sextic") return Family::Sextic;
    if (s == "coulomb") return Family::Coulomb;
    if (s == "morse") return Family::Morse;
    if (s == "general") return Family::General;
    throw InvalidArgument("unknown family '" + s + "' (expected sextic, coulomb, morse or general)");
}

/// Which specialization of sqrt(l0 + l1/r + l2/r^2) r' = -sqrt(m) is active.
///
/// The sextic closed form r = -u^2 satisfies the relation with l1 = -1/4
/// (r is negative, so l1/r must be positive).
struct FamilySpec
{
    Family family = Family::Sextic;
    double lambda0 = 0.0;
    double lambda1 = -0.25;
    double lambda2 = 0.0;
    double r0 = 0.0; ///< initial value r(x_min) for the general family

    static FamilySpec sextic() { return {Family::Sextic, 0.0, -0.25, 0.0, 0.0}; }
    static FamilySpec coulomb() { return {Family::Coulomb, 0.25, 0.0, 0.0, 0.0}; }
    static FamilySpec morse() { return {Family::Morse, 0.0, 0.0, 1.0, 0.0}; }
    static FamilySpec general(double l0, double l1, double l2, double r0) { return {Family::General, l0, l1, l2, r0}; }
    static FamilySpec of(Family f)
    {
        switch (f) {
        case Family::Sextic: return sextic();
        case Family::Coulomb: return coulomb();
        case Family::Morse: return morse();
        default: throw InvalidArgument("the general family needs explicit lambda values");
        }
    }

    double radicand(double r) const
    {
        double f = lambda0;
        if (lambda1 != 0.0) f += lambda1 / r;
        if (lambda2 != 0.0) f += lambda2 / (r * r);
        return f;
    }
};

/// Per-point samples of the change of variables.
struct MappingSample
{
    FamilySpec family;
    Grid grid;
    double u_origin = 0.0;
    std::vector<double> x, m, dm, d2m;
    std::vector<double> u;
    std::vector<double> r, r1, r2, r3;
    std::vector<bool> singular; ///< r or r' is zero or subnormal at the point

    std::size_t size() const noexcept { return x.size(); }
};

namespace detail {

// Sub-panels of composite Simpson per grid interval; m(x) is evaluated
// analytically inside each interval so the samples stay smooth.
inline constexpr std::size_t simpson_panels_per_interval = 4;
inline constexpr std::size_t rk4_steps_per_interval = 8;

// Zero or subnormal: ratios such as r'/r lose all precision there.
inline bool degenerate(double v) { return std::abs(v) < std::numeric_limits<double>::min(); }

inline double sqrt_mass(const MassProfile& p, double x)
{
    const double m = p.mass(x);
    if (!std::isfinite(m) || m < 0.0) throw NumericalError("non-finite integrand sqrt(m) at x = " + format_double(x));
    return std::sqrt(m);
}

} // namespace detail

/// u(x) = integral of sqrt(m) from `origin` (u(origin) = 0); composite Simpson
/// inside every grid interval, accumulated with compensation.
inline std::vector<double> integrate_u(const MassProfile& p, const Grid& g, std::optional<double> origin = std::nullopt)
{
    g.validate();
    const double x0 = origin.value_or(g.x_min);
    if (!p.domain().contains(x0)) throw InvalidArgument("u origin must lie inside the mass domain");
    auto f = [&p](double x) { return detail::sqrt_mass(p, x); };

    const double offset =
        x0 == g.x_min ? 0.0
                      : simpson(f, g.x_min, x0,
                                detail::simpson_panels_per_interval *
                                    std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(x0 - g.x_min) / g.h()))));

    std::vector<double> u(g.n);
    CompensatedSum acc;
    u[0] = -offset;
    for (std::size_t i = 1; i < g.n; ++i) {
        acc += simpson(f, g.x(i - 1), g.x(i), detail::simpson_panels_per_interval);
        u[i] = acc.value() - offset;
    }
    return u;
}

/// Residual sqrt(l0 + l1/r + l2/r^2) r' + sqrt(m) of the mapping relation,
/// evaluated as sign(r') sqrt(l0 r'^2 + l1 r'^2/r + l2 (r'/r)^2) so that
/// r' / r stays finite when r underflows.
inline double mapping_relation_residual(const FamilySpec& fam, double m, double r, double r1)
{
    double f = fam.lambda0 * r1 * r1;
    if (fam.lambda1 != 0.0) f += fam.lambda1 * r1 * (r1 / r);
    if (fam.lambda2 != 0.0) f += fam.lambda2 * (r1 / r) * (r1 / r);
    return std::copysign(std::sqrt(f), r1) + std::sqrt(m);
}

namespace detail {

struct RDerivs
{
    double r, r1, r2, r3;
};

// Derivatives of r from r' = -g(x) G(r), g = sqrt(m), G = F^{-1/2}.
inline RDerivs general_derivatives(const FamilySpec& fam, double r, const MassValues& mv)
{
    const double F = fam.radicand(r);
    if (!(F > 0.0)) throw NumericalError("mapping radicand is not positive (r = " + format_double(r) + ")");
    double Fr = 0.0, Frr = 0.0;
    if (fam.lambda1 != 0.0) {
        Fr -= fam.lambda1 / (r * r);
        Frr += 2.0 * fam.lambda1 / (r * r * r);
    }
    if (fam.lambda2 != 0.0) {
        Fr -= 2.0 * fam.lambda2 / (r * r * r);
        Frr += 6.0 * fam.lambda2 / (r * r * r * r);
    }
    const double G = 1.0 / std::sqrt(F);
    const double Gr = -0.5 * std::pow(F, -1.5) * Fr;
    const double Grr = 0.75 * std::pow(F, -2.5) * Fr * Fr - 0.5 * std::pow(F, -1.5) * Frr;
    const double g = std::sqrt(mv.m);
    const double g1 = mv.dm / (2.0 * g);
    const double g2 = mv.d2m / (2.0 * g) - mv.dm * mv.dm / (4.0 * mv.m * g);
    const double r1 = -g * G;
    const double r2 = -g1 * G + g * g * G * Gr;
    const double r3 = -g2 * G + 3.0 * g * g1 * G * Gr - g * g * g * G * (Gr * Gr + G * Grr);
    return {r, r1, r2, r3};
}

inline RDerivs family_derivatives(Family f, double u, const MassValues& mv)
{
    const double u1 = std::sqrt(mv.m);
    const double u2 = mv.dm / (2.0 * u1);
    const double u3 = mv.d2m / (2.0 * u1) - mv.dm * mv.dm / (4.0 * mv.m * u1);
    switch (f) {
    case Family::Sextic:
        return {-u * u, -2.0 * u * u1, -2.0 * (u1 * u1 + u * u2), -2.0 * (3.0 * u1 * u2 + u * u3)};
    case Family::Coulomb: return {-2.0 * u, -2.0 * u1, -2.0 * u2, -2.0 * u3};
    case Family::Morse: {
        const double r = std::exp(-u);
        return {r, -u1 * r, (u1 * u1 - u2) * r, (-u1 * u1 * u1 + 3.0 * u1 * u2 - u3) * r};
    }
    default: throw InvalidArgument("closed-form mapping requested for the general family");
    }
}

} // namespace detail

/// r and its first three derivatives on the grid. Closed forms for the
/// three families (r = -u^2, -2u, e^{-u}); RK4 integration of the mapping
/// relation from r0 for the general family.
inline void map_r(const FamilySpec& fam, const MassProfile& p, MappingSample& s)
{
    const std::size_t n = s.size();
    s.r.assign(n, 0.0);
    s.r1.assign(n, 0.0);
    s.r2.assign(n, 0.0);
    s.r3.assign(n, 0.0);
    s.singular.assign(n, false);

    if (fam.family != Family::General) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto d = detail::family_derivatives(fam.family, s.u[i], {s.m[i], s.dm[i], s.d2m[i]});
            s.r[i] = d.r;
            s.r1[i] = d.r1;
            s.r2[i] = d.r2;
            s.r3[i] = d.r3;
            s.singular[i] = detail::degenerate(d.r) || detail::degenerate(d.r1);
        }
        return;
    }

    if (fam.r0 == 0.0 && (fam.lambda1 != 0.0 || fam.lambda2 != 0.0))
        throw InvalidArgument("general mapping cannot start at r0 = 0 when lambda1 or lambda2 is non-zero");
    auto rhs = [&](double x, double r) {
        if (r == 0.0 && (fam.lambda1 != 0.0 || fam.lambda2 != 0.0))
            throw NumericalError("general mapping reached r = 0 at x = " + format_double(x));
        const double F = fam.radicand(r);
        if (!(F > 0.0))
            throw NumericalError("mapping radicand l0 + l1/r + l2/r^2 is not positive at x = " + format_double(x));
        return -detail::sqrt_mass(p, x) / std::sqrt(F);
    };

    double r = fam.r0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double a = s.x[i - 1];
            const double hs = (s.x[i] - a) / static_cast<double>(detail::rk4_steps_per_interval);
            for (std::size_t k = 0; k < detail::rk4_steps_per_interval; ++k) {
                const double xk = a + static_cast<double>(k) * hs;
                const double k1 = rhs(xk, r);
                const double k2 = rhs(xk + 0.5 * hs, r + 0.5 * hs * k1);
                const double k3 = rhs(xk + 0.5 * hs, r + 0.5 * hs * k2);
                const double k4 = rhs(xk + hs, r + hs * k3);
                r += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        const auto d = detail::general_derivatives(fam, r, {s.m[i], s.dm[i], s.d2m[i]});
        s.r[i] = d.r;
        s.r1[i] = d.r1;
        s.r2[i] = d.r2;
        s.r3[i] = d.r3;
        s.singular[i] = detail::degenerate(d.r) || detail::degenerate(d.r1);
    }
}

/// Default zero of u: x = 0 when the grid contains it, else the nearer end.
inline double default_u_origin(const Grid& g) { return std::clamp(0.0, g.x_min, g.x_max); }

/// Samples m, u and r on the grid.
inline MappingSample build_mapping(const FamilySpec& fam, const MassProfile& p, const Grid& g,
                                   std::optional<double> u_origin = std::nullopt)
{
    g.validate();
    MappingSample s;
    s.family = fam;
    s.grid = g;
    s.u_origin = u_origin.value_or(default_u_origin(g));
    s.x.resize(g.n);
    s.m.resize(g.n);
    s.dm.resize(g.n);
    s.d2m.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        s.x[i] = g.x(i);
        const auto mv = eval_profile(p, s.x[i]);
        s.m[i] = mv.m;
        s.dm[i] = mv.dm;
        s.d2m[i] = mv.d2m;
    }
    s.u = integrate_u(p, g, s.u_origin);
    map_r(fam, p, s);
    return s;
}

/// W = (1/4) [2 m'/m - 6 r''/r' + (1 - 2l - 2 b r + 2 q r^2) r'/r]; NaN where
/// the mapping is singular.
inline std::vector<double> weight_W(const AlgebraParams& params, const MappingSample& s)
{
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.singular[i]) {
            w[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double r = s.r[i];
        w[i] = 0.25 * (2.0 * s.dm[i] / s.m[i] - 6.0 * s.r2[i] / s.r1[i] +
                       (1.0 - 2.0 * params.ell - 2.0 * params.b * r + 2.0 * params.q * r * r) * s.r1[i] / r);
    }
    return w;
}

/// Antiderivative of W in closed form,
///   Omega = (1/4) [2 ln m - 6 ln|r'| + (1 - 2l) ln|r| - 2 b r + q r^2],
/// shifted so that Omega = 0 at the first regular grid point. NaN where the
/// mapping is singular.
inline std::vector<double> omega(const AlgebraParams& params, const MappingSample& s)
{
    std::vector<double> out(s.size(), std::numeric_limits<double>::quiet_NaN());
    std::optional<double> ref;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.singular[i]) continue;
        const double r = s.r[i];
        const double v = 0.25 * (2.0 * std::log(s.m[i]) - 6.0 * std::log(std::abs(s.r1[i])) +
                                 (1.0 - 2.0 * params.ell) * std::log(std::abs(r)) - 2.0 * params.b * r +
                                 params.q * r * r);
        if (!ref) ref = v;
        out[i] = v - *ref;
    }
    return out;
}

/// Cumulative Simpson integral of W from the first grid point; requires W
/// finite everywhere. Cross-check for the closed form above.
inline std::vector<double> omega_quadrature(const std::vector<double>& W, const Grid& g)
{
    for (double w : W)
        if (!std::isfinite(w)) throw InvalidArgument("W has singular points; quadrature is undefined");
    return cumulative_simpson(W, g.h());
}

/// Interior sign changes, ignoring samples below 1e-8 of the peak magnitude.
inline int count_nodes(const std::vector<double>& psi)
{
    double peak = 0.0;
    for (double v : psi)
        if (std::isfinite(v)) peak = std::max(peak, std::abs(v));
    const double floor = 1e-8 * peak;
    int nodes = 0;
    double last = 0.0;
    for (double v : psi) {
        if (!std::isfinite(v) || std::abs(v) <= floor) continue;
        if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++nodes;
        last = v;
    }
    return nodes;
}

struct NormalizabilityCheck
{
    bool normalizable;
    double tail_ratio;
};

/// Share of the integral of |psi|^2 carried by the outer 10% of the domain.
inline NormalizabilityCheck check_normalizable(const std::vector<double>& psi, const Grid& g)
{
    std::vector<double> dens(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) dens[i] = std::isfinite(psi[i]) ? psi[i] * psi[i] : 0.0;
    const double h = g.h();
    const double total = trapezoid(dens, h, 0, dens.size() - 1);
    const double threshold = g.x_max - 0.1 * (g.x_max - g.x_min);
    std::size_t first = 0;
    while (first < dens.size() && g.x(first) < threshold - 1e-12 * (g.x_max - g.x_min)) ++first;
    const double tail = first + 1 < dens.size() ? trapezoid(dens, h, first, dens.size() - 1) : 0.0;
    const double ratio = total > 0.0 ? tail / total : 1.0;
    return {ratio < 1e-4, ratio};
}

struct PsiSamples
{
    std::vector<double> raw;
    std::vector<double> normalized; ///< empty unless normalizable
    int nodes = 0;
    double prefactor_sign = 1.0; ///< sign of -2 r m / r'^2 on the regular points
    NormalizabilityCheck norm{false, 1.0};
};

/// psi = -(2 r / r'^2) m e^{-Omega} R(r). Singular mapping points get psi = 0.
/// The envelope |2 r m / r'^2| e^{-Omega} is rescaled so its peak on the grid
/// is 1; only the polynomial factor can then push values out of range.
inline PsiSamples assemble_psi(const AlgebraParams& params, const QesPolynomial& R, const MappingSample& s)
{
    const auto om = omega(params, s);
    PsiSamples out;
    out.raw.assign(s.size(), 0.0);
    std::vector<double> log_mag(s.size(), -std::numeric_limits<double>::infinity());
    double peak = -std::numeric_limits<double>::infinity();
    bool sign_set = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.singular[i]) continue;
        const double pref = -2.0 * s.r[i] * s.m[i] / (s.r1[i] * s.r1[i]);
        log_mag[i] = std::log(std::abs(pref)) - om[i];
        if (!std::isfinite(log_mag[i]))
            throw NumericalError("exp(-Omega) is not representable at x = " + format_double(s.x[i]) +
                                 "; truncate the domain");
        peak = std::max(peak, log_mag[i]);
        if (!sign_set) {
            out.prefactor_sign = pref < 0.0 ? -1.0 : 1.0;
            sign_set = true;
        }
    }
    if (!sign_set) throw NumericalError("mapping is singular at every grid point");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.singular[i]) continue;
        const double sign = s.r[i] > 0.0 ? -1.0 : 1.0;
        out.raw[i] = sign * std::exp(log_mag[i] - peak) * R(s.r[i]);
        if (!std::isfinite(out.raw[i]))
            throw NumericalError("wavefunction overflows at x = " + format_double(s.x[i]) + "; truncate the domain");
    }
    out.nodes = count_nodes(out.raw);
    out.norm = check_normalizable(out.raw, s.grid);
    if (out.norm.normalizable) {
        std::vector<double> dens(out.raw.size());
        for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = out.raw[i] * out.raw[i];
        const double total = trapezoid(dens, s.grid.h(), 0, dens.size() - 1);
        out.normalized = out.raw;
        const double c = 1.0 / std::sqrt(total);
        for (double& v : out.normalized) v *= c;
    }
    return out;
}

/// Convenience overload building R from the recurrence at `epsilon` (q != 0).
inline PsiSamples assemble_psi(const AlgebraParams& params, double epsilon, const MappingSample& s)
{
    return assemble_psi(params, R_coefficients(params, epsilon), s);
}

} // namespace qes
