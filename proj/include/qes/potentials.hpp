#pragma once

// Potentials generated by the algebraic construction: the general implicit
// form in terms of r(x), and the explicit sextic, Coulomb and Morse families
// with their closed-form energies.

#include <qes/algebra.hpp>
#include <qes/error.hpp>
#include <qes/mapping.hpp>
#include <qes/mass_profile.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace qes {

/// von Roos ordering exponents with alpha + beta + gamma = -1.
struct MassOrdering
{
    double alpha = 0.0;
    double beta = -1.0;

    double gamma() const noexcept { return -1.0 - alpha - beta; }

    void validate() const
    {
        if (!std::isfinite(alpha) || !std::isfinite(beta)) throw InvalidArgument("ordering exponents must be finite");
    }

    /// alpha (alpha + beta + 1), the combination that survives in the
    /// effective potential.
    double alpha_product() const noexcept { return alpha * (alpha + beta + 1.0); }
};

/// Mass-ordering contribution shared by the three explicit families:
///   (a(a+b+1) + b + 9/16) m'^2 / (2 m^3) - (1 + 2b) m'' / (8 m^2).
inline double family_ordering_term(const MassOrdering& o, double m, double dm, double d2m)
{
    return (o.alpha_product() + o.beta + 9.0 / 16.0) * dm * dm / (2.0 * m * m * m) -
           (1.0 + 2.0 * o.beta) * d2m / (8.0 * m * m);
}

struct PotentialCurve
{
    Family family = Family::Sextic;
    AlgebraParams params;
    MassOrdering ordering;
    std::string mass_name;
    double energy = 0.0;
    std::optional<double> epsilon;
    std::vector<double> x;
    std::vector<double> V;             ///< NaN at excluded points
    std::vector<std::size_t> excluded; ///< indices of singular or oversized values

    static constexpr double max_magnitude = 1e12;

    std::size_t size() const noexcept { return x.size(); }
    bool retained(std::size_t i) const { return std::isfinite(V[i]); }
};

namespace detail {

inline PotentialCurve make_curve(Family f, const AlgebraParams& params, const MassOrdering& ord, const MassProfile& p,
                                 const MappingSample& map, double energy, std::optional<double> eps)
{
    params.validate();
    ord.validate();
    PotentialCurve c;
    c.family = f;
    c.params = params;
    c.ordering = ord;
    c.mass_name = p.name();
    c.energy = energy;
    c.epsilon = eps;
    c.x = map.x;
    c.V.assign(map.size(), std::numeric_limits<double>::quiet_NaN());
    return c;
}

inline void store(PotentialCurve& c, std::size_t i, double v)
{
    if (!std::isfinite(v) || std::abs(v) > PotentialCurve::max_magnitude) {
        c.V[i] = std::numeric_limits<double>::quiet_NaN();
        c.excluded.push_back(i);
        return;
    }
    c.V[i] = v;
}

inline void require_family(const MappingSample& map, Family f)
{
    if (map.family.family != f)
        throw InvalidArgument("potential for the " + to_string(f) + " family needs a " + to_string(f) +
                              " mapping, got " + to_string(map.family.family));
}

} // namespace detail

inline double e_sextic(const AlgebraParams& p, double epsilon) { return (p.ell + 1.5) * p.b + 2.0 * epsilon; }

/// E = ((2l + 8j + 5) q - b^2) / 2; independent of epsilon.
inline double e_coulomb(const AlgebraParams& p) { return 0.5 * ((2.0 * p.ell + 8.0 * p.j() + 5.0) * p.q - p.b * p.b); }

inline double e_morse(const AlgebraParams& p) { return -(p.ell * (p.ell + 1.0) + 0.25) / 8.0; }

/// Energy attached to the state with spectral parameter `epsilon`.
inline double family_energy(Family f, const AlgebraParams& p, double epsilon)
{
    switch (f) {
    case Family::Sextic: return e_sextic(p, epsilon);
    case Family::Coulomb: return e_coulomb(p);
    case Family::Morse: return e_morse(p);
    default: throw InvalidArgument("the general family has no closed-form energy; supply E explicitly");
    }
}

/// Implicit potential in terms of r(x):
///   V = E + (1/m) { (b + 1/4 + a(a+b+1)) m'^2/(2 m^2) - b m''/(4 m)
///                   + (3/8)(r''/r')^2 - r'''/(4 r')
///                   + [b^2 - (2l+8j+5) q + (4 eps + b(2l+3))/r + (l(l+1) - 3/4)/r^2
///                      - 2 b q r + q^2 r^2] r'^2 / 8 }
/// (a, b in the first line are the ordering exponents alpha, beta).
inline PotentialCurve v_general(const AlgebraParams& params, const MassOrdering& ord, const MassProfile& p,
                                const MappingSample& map, double epsilon, std::optional<double> energy)
{
    if (!energy) {
        if (map.family.family == Family::General)
            throw InvalidArgument("the general family needs an explicit energy");
        energy = family_energy(map.family.family, params, epsilon);
    }
    auto c = detail::make_curve(Family::General, params, ord, p, map, *energy, epsilon);
    const double l = params.ell, b = params.b, q = params.q;
    const double c0 = b * b - (2.0 * l + 8.0 * params.j() + 5.0) * q;
    const double c1 = 4.0 * epsilon + b * (2.0 * l + 3.0);
    const double c2 = l * (l + 1.0) - 0.75;
    const double k_m1 = ord.beta + 0.25 + ord.alpha_product();
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map.singular[i]) {
            detail::store(c, i, std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double m = map.m[i], dm = map.dm[i], d2m = map.d2m[i];
        const double r = map.r[i], r1 = map.r1[i], r2 = map.r2[i], r3 = map.r3[i];
        const double bracket = c0 + c1 / r + c2 / (r * r) - 2.0 * b * q * r + q * q * r * r;
        const double inner = k_m1 * dm * dm / (2.0 * m * m) - ord.beta * d2m / (4.0 * m) +
                             0.375 * (r2 / r1) * (r2 / r1) - r3 / (4.0 * r1) + bracket * r1 * r1 / 8.0;
        detail::store(c, i, *energy + inner / m);
    }
    return c;
}

/// V = l(l+1)/(2u^2) + (b^2 - (2l+8j+5) q) u^2/2 + b q u^4 + q^2 u^6/2 + ordering terms.
inline PotentialCurve v_sextic(const AlgebraParams& params, const MassOrdering& ord, const MassProfile& p,
                               const MappingSample& map, std::optional<double> epsilon = std::nullopt)
{
    detail::require_family(map, Family::Sextic);
    const double e = epsilon ? e_sextic(params, *epsilon) : std::numeric_limits<double>::quiet_NaN();
    auto c = detail::make_curve(Family::Sextic, params, ord, p, map, e, epsilon);
    const double l = params.ell, b = params.b, q = params.q;
    const double k2 = 0.5 * (b * b - (2.0 * l + 8.0 * params.j() + 5.0) * q);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double u = map.u[i];
        if (u == 0.0) {
            detail::store(c, i, std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double u2 = u * u;
        const double v = l * (l + 1.0) / (2.0 * u2) + k2 * u2 + b * q * u2 * u2 + 0.5 * q * q * u2 * u2 * u2 +
                         family_ordering_term(ord, map.m[i], map.dm[i], map.d2m[i]);
        detail::store(c, i, v);
    }
    return c;
}

/// V = (l(l+1) - 3/4)/(8u^2) - (4 eps + (2l+3) b)/(4u) + 2 b q u + 2 q^2 u^2 + ordering terms.
inline PotentialCurve v_coulomb(const AlgebraParams& params, const MassOrdering& ord, const MassProfile& p,
                                const MappingSample& map, double epsilon)
{
    detail::require_family(map, Family::Coulomb);
    auto c = detail::make_curve(Family::Coulomb, params, ord, p, map, e_coulomb(params), epsilon);
    const double l = params.ell, b = params.b, q = params.q;
    const double k_inv2 = (l * (l + 1.0) - 0.75) / 8.0;
    const double k_inv1 = -(4.0 * epsilon + (2.0 * l + 3.0) * b) / 4.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double u = map.u[i];
        if (u == 0.0) {
            detail::store(c, i, std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double v = k_inv2 / (u * u) + k_inv1 / u + 2.0 * b * q * u + 2.0 * q * q * u * u +
                         family_ordering_term(ord, map.m[i], map.dm[i], map.d2m[i]);
        detail::store(c, i, v);
    }
    return c;
}

/// V = (eps + (l/2 + 3/4) b) e^{-u}/2 + (b^2/4 - (l/2 + 2j + 5/4) q) e^{-2u}/2
///     - (b q/4) e^{-3u} + (q^2/8) e^{-4u} + ordering terms.
inline PotentialCurve v_morse(const AlgebraParams& params, const MassOrdering& ord, const MassProfile& p,
                              const MappingSample& map, double epsilon)
{
    detail::require_family(map, Family::Morse);
    auto c = detail::make_curve(Family::Morse, params, ord, p, map, e_morse(params), epsilon);
    const double l = params.ell, b = params.b, q = params.q;
    const double k1 = 0.5 * (epsilon + (0.5 * l + 0.75) * b);
    const double k2 = 0.5 * (0.25 * b * b - (0.5 * l + 2.0 * params.j() + 1.25) * q);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double u = map.u[i];
        if (-4.0 * u > 700.0)
            throw NumericalError("e^{-4u} overflows at x = " + format_double(map.x[i]) +
                                 "; move x_min so that u stays above -175");
        const double e1 = std::exp(-u);
        const double v = k1 * e1 + k2 * e1 * e1 - 0.25 * b * q * e1 * e1 * e1 + 0.125 * q * q * e1 * e1 * e1 * e1 +
                         family_ordering_term(ord, map.m[i], map.dm[i], map.d2m[i]);
        detail::store(c, i, v);
    }
    return c;
}

/// Family potential for a state; the sextic potential does not depend on epsilon.
inline PotentialCurve family_potential(const AlgebraParams& params, const MassOrdering& ord, const MassProfile& p,
                                       const MappingSample& map, double epsilon, std::optional<double> energy = {})
{
    switch (map.family.family) {
    case Family::Sextic: return v_sextic(params, ord, p, map, epsilon);
    case Family::Coulomb: return v_coulomb(params, ord, p, map, epsilon);
    case Family::Morse: return v_morse(params, ord, p, map, epsilon);
    default: return v_general(params, ord, p, map, epsilon, energy);
    }
}

/// One algebraic eigenstate: spectral parameter, polynomial factor and energy.
struct AlgebraicState
{
    int index = 0;
    double epsilon = 0.0;
    double energy = 0.0;
    QesPolynomial polynomial;
};

/// Polynomial solution of the q = 0 (exactly solvable) equation with
/// epsilon = b n: c_{k+1} = (eps - b k) c_k / ((k+1)(k + l + 3/2)).
inline QesPolynomial exact_polynomial(const AlgebraParams& p, int n)
{
    if (n < 0) throw InvalidArgument("polynomial degree must be non-negative");
    if (p.ell + 1.5 <= 0.0) throw InvalidArgument("exactly solvable polynomial needs l > -3/2");
    const double eps = p.b * n;
    QesPolynomial out;
    out.coeffs.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.coeffs[0] = 1.0;
    double peak = 1.0;
    for (int k = 0; k < n; ++k) {
        out.coeffs[k + 1] = (eps - p.b * k) * out.coeffs[k] / ((k + 1.0) * (k + p.ell + 1.5));
        peak = std::max(peak, std::abs(out.coeffs[k + 1]));
    }
    for (double& c : out.coeffs) c /= peak;
    out.log_scale = -std::log(peak);
    return out;
}

/// The 2j+1 algebraic states ordered by epsilon. For q = 0 the spectrum
/// reduces to epsilon_n = b n (n = 0..2j), collapsing to one state when b = 0.
/// `general_energy` supplies E for the general family.
inline std::vector<AlgebraicState> algebraic_states(const AlgebraParams& params, Family f,
                                                    std::optional<double> general_energy = {})
{
    params.validate();
    auto energy = [&](double eps) {
        if (f == Family::General) {
            if (!general_energy) throw InvalidArgument("the general family needs an explicit energy");
            return *general_energy;
        }
        return family_energy(f, params, eps);
    };
    std::vector<AlgebraicState> out;
    if (params.q == 0.0) {
        const int count = params.b == 0.0 ? 1 : params.dimension();
        for (int n = 0; n < count; ++n) out.push_back({n, params.b * n, energy(params.b * n), exact_polynomial(params, n)});
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
    } else {
        const auto spec = epsilon_roots(build_spectral_table(params));
        for (std::size_t k = 0; k < spec.roots.size(); ++k) {
            const double eps = spec.roots[k];
            out.push_back({0, eps, energy(eps), R_coefficients(params, eps)});
        }
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k].index = static_cast<int>(k);
    return out;
}

} // namespace qes
