#pragma once

// Algebraic part of the quasi-exactly-solvable construction: the three-term
// recurrence for P_m(eps), its critical polynomial, and the sl(2,R) operator
// whose finite-dimensional spectrum must coincide with the critical roots.

#include <qes/error.hpp>
#include <qes/linalg.hpp>
#include <qes/numeric.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace qes {

/// Parameters (l, b, q, j) of the QES equation
///   z R'' + (l + 3/2 + z(b - q z)) R' + (-eps + 2 j q z) R = 0.
/// `two_j` stores 2j so that half-integer j is exact.
struct AlgebraParams
{
    double ell = 0.0;
    double b = 0.0;
    double q = 1.0;
    int two_j = 0;

    static constexpr int max_two_j = 64;

    double j() const noexcept { return 0.5 * two_j; }
    int dimension() const noexcept { return two_j + 1; }

    void validate() const
    {
        if (two_j < 0) throw InvalidArgument("2j must be non-negative");
        if (two_j > max_two_j) throw InvalidArgument("2j = " + std::to_string(two_j) + " exceeds the cap of 64");
        if (!std::isfinite(ell) || !std::isfinite(b) || !std::isfinite(q))
            throw InvalidArgument("algebra parameters must be finite");
    }

    /// Builds the parameters from a decimal j; throws unless j is a half-integer.
    static AlgebraParams with_j(double ell, double b, double q, double j)
    {
        if (!is_half_integer(j) || j < 0.0)
            throw InvalidArgument("j must be a non-negative integer or half-integer, got " + format_double(j));
        AlgebraParams p{ell, b, q, static_cast<int>(std::lround(2.0 * j))};
        p.validate();
        return p;
    }
};

/// Coefficients of P_0 ... P_{2j+1} in ascending powers of eps.
struct SpectralTable
{
    AlgebraParams params;
    std::vector<std::vector<double>> coeffs;

    const std::vector<double>& critical() const { return coeffs.back(); }
};

struct EpsilonSpectrum
{
    std::vector<double> roots; ///< ascending
    AlgebraParams params;

    bool complete() const noexcept { return static_cast<int>(roots.size()) == params.dimension(); }
};

/// Matrix of the sl(2,R) operator on the monomial basis {1, z, ..., z^{2j}};
/// column k is the image of z^k.
struct OperatorMatrix
{
    linalg::DenseMatrix matrix;
    AlgebraParams params;
};

namespace detail {

inline void require_nonzero_q(const AlgebraParams& p)
{
    if (p.q == 0.0) throw InvalidArgument("q = 0 is the exactly-solvable reduction, no critical polynomial");
}

// coefficient of P_{m-1} in the recurrence: m (l + m + 1/2)
inline double lower_coupling(const AlgebraParams& p, int m) { return m * (p.ell + m + 0.5); }
// coefficient of P_{m+1}: (2j - m) q
inline double upper_coupling(const AlgebraParams& p, int m) { return (p.two_j - m) * p.q; }

} // namespace detail

/// Builds P_0 ... P_{2j+1} from
///   (2j - m) q P_{m+1} = (eps - b m) P_m - m (l + m + 1/2) P_{m-1},  P_0 = 1.
/// At m = 2j the left coefficient vanishes; P_{2j+1} is then the right-hand
/// side itself, so its zeros are exactly the termination condition.
inline SpectralTable build_spectral_table(const AlgebraParams& params)
{
    params.validate();
    detail::require_nonzero_q(params);

    const int top = params.two_j;
    SpectralTable table{params, {}};
    table.coeffs.reserve(top + 2);
    table.coeffs.push_back({1.0});

    for (int m = 0; m <= top; ++m) {
        const auto& pm = table.coeffs[m];
        const std::vector<double> empty;
        const auto& pm1 = m > 0 ? table.coeffs[m - 1] : empty;
        const double lower = detail::lower_coupling(params, m);
        const double denom = m < top ? detail::upper_coupling(params, m) : 1.0;

        std::vector<double> next(m + 2, 0.0);
        for (int k = 0; k <= m + 1; ++k) {
            CompensatedSum s;
            if (k >= 1) s += pm[k - 1];
            if (k <= m) s += -params.b * m * pm[k];
            if (k < static_cast<int>(pm1.size())) s += -lower * pm1[k];
            next[k] = s.value() / denom;
            if (!std::isfinite(next[k]))
                throw NumericalError("coefficient overflow building P_" + std::to_string(m + 1) + " (at m = " +
                                     std::to_string(m) + ")");
        }
        table.coeffs.push_back(std::move(next));
    }
    return table;
}

/// Values P_m(eps) for m = 0 ... 2j by the recurrence (no coefficients).
inline std::vector<double> recurrence_values(const AlgebraParams& p, double eps)
{
    detail::require_nonzero_q(p);
    std::vector<double> v(p.two_j + 1);
    v[0] = 1.0;
    for (int m = 0; m < p.two_j; ++m) {
        const double prev = m > 0 ? v[m - 1] : 0.0;
        v[m + 1] = ((eps - p.b * m) * v[m] - detail::lower_coupling(p, m) * prev) / detail::upper_coupling(p, m);
    }
    return v;
}

/// P_{2j+1}(eps) and its derivative, evaluated through the recurrence.
inline std::pair<double, double> critical_value(const AlgebraParams& p, double eps)
{
    detail::require_nonzero_q(p);
    double pm1 = 0.0, pm = 1.0;   // P_{m-1}, P_m
    double dm1 = 0.0, dm = 0.0;   // derivatives
    for (int m = 0; m <= p.two_j; ++m) {
        const double denom = m < p.two_j ? detail::upper_coupling(p, m) : 1.0;
        const double lower = detail::lower_coupling(p, m);
        const double next = ((eps - p.b * m) * pm - lower * pm1) / denom;
        const double dnext = (pm + (eps - p.b * m) * dm - lower * dm1) / denom;
        pm1 = pm;
        pm = next;
        dm1 = dm;
        dm = dnext;
    }
    return {pm, dm};
}

/// Horner evaluation of an ascending coefficient vector.
inline double polyval(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// |p(x)| divided by sum |c_k| |x|^k: the residual relative to the
/// coefficient scale of the polynomial at x.
inline double relative_polynomial_residual(const std::vector<double>& c, double x)
{
    double scale = 0.0, xp = 1.0;
    for (double ck : c) {
        scale += std::abs(ck) * xp;
        xp *= std::abs(x);
    }
    return scale > 0.0 ? std::abs(polyval(c, x)) / scale : 0.0;
}

/// The recurrence written as an eigenproblem eps P = M P (row m couples
/// P_{m-1}, P_m, P_{m+1}).
inline linalg::DenseMatrix recurrence_matrix(const AlgebraParams& p)
{
    const int n = p.dimension();
    linalg::DenseMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = p.b * i;
        if (i + 1 < n) m(i, i + 1) = detail::upper_coupling(p, i);
        if (i > 0) m(i, i - 1) = detail::lower_coupling(p, i);
    }
    return m;
}

/// Real roots of P_{2j+1}, ascending, each polished by one guarded Newton step.
///
/// The recurrence matrix is symmetrized by a diagonal similarity when every
/// product of paired off-diagonals is positive (q > 0, l > -3/2) and solved by
/// Sturm bisection; otherwise the sl(2,R) matrix goes through Hessenberg QR.
inline EpsilonSpectrum epsilon_roots(const SpectralTable& table)
{
    const AlgebraParams& p = table.params;
    detail::require_nonzero_q(p);
    if (static_cast<int>(table.coeffs.size()) != p.two_j + 2)
        throw InvalidArgument("spectral table does not match its parameters");

    const auto mat = recurrence_matrix(p);
    std::vector<double> candidates;
    linalg::SymTridiagonal sym;
    if (linalg::symmetrize_tridiagonal(mat, sym)) {
        candidates = linalg::all_eigenvalues(sym);
    } else {
        for (const auto& z : linalg::general_eigenvalues(mat)) {
            const double scale = std::max(1.0, std::abs(z));
            if (std::abs(z.imag()) <= 1e-9 * scale) candidates.push_back(z.real());
        }
        std::sort(candidates.begin(), candidates.end());
    }

    if (candidates.empty()) {
        std::string msg = "no real roots of the critical polynomial; coefficients [";
        for (std::size_t k = 0; k < table.critical().size(); ++k)
            msg += (k ? ", " : "") + format_double(table.critical()[k]);
        throw NumericalError(msg + "]");
    }

    for (double& root : candidates) {
        const auto [f, df] = critical_value(p, root);
        if (df == 0.0 || !std::isfinite(f) || !std::isfinite(df)) continue;
        const double polished = root - f / df;
        if (std::abs(critical_value(p, polished).first) <= std::abs(f)) root = polished;
    }
    std::sort(candidates.begin(), candidates.end());
    return {candidates, p};
}

/// Matrix of J-J0 + (l + j + 1/2) J- + q J+ + b J0 + j b on {1, z, ..., z^{2j}},
/// with J- = d/dz, J0 = z d/dz - j, J+ = -z^2 d/dz + 2 j z.
///
/// Each generator is applied to z^k literally; the entries are collected per
/// generator rather than from the closed-form recurrence.
inline OperatorMatrix sl2_operator_matrix(const AlgebraParams& params)
{
    params.validate();
    const int n = params.dimension();
    const double j = params.j();
    linalg::DenseMatrix mat(n);

    // A polynomial image is a sparse map degree -> coefficient; degrees stay
    // in [k-1, k+1] for every generator used here.
    struct Term
    {
        int degree;
        double coeff;
    };
    auto jminus = [](const Term& t) { return Term{t.degree - 1, t.coeff * t.degree}; };
    auto jzero = [j](const Term& t) { return Term{t.degree, t.coeff * (t.degree - j)}; };
    auto jplus = [j](const Term& t) { return Term{t.degree + 1, t.coeff * (2.0 * j - t.degree)}; };
    auto add = [&](int col, const Term& t) {
        if (t.coeff == 0.0) return;
        if (t.degree < 0 || t.degree >= n)
            throw NumericalError("sl(2) image left the polynomial space at degree " + std::to_string(t.degree));
        mat(t.degree, col) += t.coeff;
    };

    for (int k = 0; k < n; ++k) {
        const Term zk{k, 1.0};
        add(k, jminus(jzero(zk)));
        Term t = jminus(zk);
        add(k, {t.degree, t.coeff * (params.ell + j + 0.5)});
        t = jplus(zk);
        add(k, {t.degree, t.coeff * params.q});
        t = jzero(zk);
        add(k, {t.degree, t.coeff * params.b});
        add(k, {k, j * params.b});
    }
    return {mat, params};
}

/// Polynomial solution of the QES equation in its own variable z,
/// normalized so that max |c_k| = 1. `log_scale` is the log of the factor
/// divided out of the raw coefficients, `scale_sign` its sign.
struct QesPolynomial
{
    std::vector<double> coeffs;
    double log_scale = 0.0;
    double scale_sign = 1.0;

    double operator()(double z) const { return polyval(coeffs, z); }
    double derivative(double z) const
    {
        double acc = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs[k];
        return acc;
    }
    double second_derivative(double z) const
    {
        double acc = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 2;) acc = acc * z + static_cast<double>(k * (k - 1)) * coeffs[k];
        return acc;
    }
    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
};

/// log |w_m| of the factorial weight
///   w_m = (2j)! (2l+1)! (l+m)! / (2 m! (2j-m)! (2l+1+2m)!)
/// continued to real l through the gamma function.
inline double log_factorial_weight(const AlgebraParams& p, int m)
{
    if (2.0 * p.ell + 1.0 < 0.0)
        throw InvalidArgument("factorial weight needs 2l + 1 >= 0, got l = " + format_double(p.ell));
    if (m < 0 || m > p.two_j) throw InvalidArgument("weight index out of range");
    const double l = p.ell;
    return std::lgamma(p.two_j + 1.0) + std::lgamma(2.0 * l + 2.0) + std::lgamma(l + m + 1.0) - std::log(2.0) -
           std::lgamma(m + 1.0) - std::lgamma(p.two_j - m + 1.0) - std::lgamma(2.0 * l + 2.0 * m + 2.0);
}

/// Coefficients of the degree-2j polynomial solving the QES equation at a
/// root eps. The factorial weight multiplies P_m(eps)(-q)^m in the variable
/// w = -4 z; re-expressed in z this is w_m P_m(eps) (4 q)^m.
inline QesPolynomial R_coefficients(const AlgebraParams& params, double epsilon)
{
    params.validate();
    detail::require_nonzero_q(params);
    const auto pm = recurrence_values(params, epsilon);
    const int n = params.dimension();

    std::vector<double> logs(n), signs(n);
    double max_log = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < n; ++m) {
        if (pm[m] == 0.0) {
            logs[m] = -std::numeric_limits<double>::infinity();
            signs[m] = 0.0;
            continue;
        }
        logs[m] = log_factorial_weight(params, m) + std::log(std::abs(pm[m])) + m * std::log(4.0 * std::abs(params.q));
        signs[m] = (pm[m] < 0.0 ? -1.0 : 1.0) * ((params.q < 0.0 && m % 2) ? -1.0 : 1.0);
        if (!std::isfinite(logs[m])) throw NumericalError("non-finite polynomial coefficient at m = " + std::to_string(m));
        max_log = std::max(max_log, logs[m]);
    }
    QesPolynomial out;
    out.coeffs.resize(n);
    out.log_scale = max_log;
    for (int m = 0; m < n; ++m) out.coeffs[m] = signs[m] == 0.0 ? 0.0 : signs[m] * std::exp(logs[m] - max_log);
    return out;
}

/// Pointwise residual of the QES equation for polynomial R at z, together
/// with the largest magnitude among its individual terms.
inline std::pair<double, double> qes_equation_residual(const AlgebraParams& p, double epsilon,
                                                       const QesPolynomial& R, double z)
{
    const double r0 = R(z), r1 = R.derivative(z), r2 = R.second_derivative(z);
    const double t1 = z * r2;
    const double t2 = (p.ell + 1.5) * r1;
    const double t3 = z * p.b * r1;
    const double t4 = -p.q * z * z * r1;
    const double t5 = -epsilon * r0;
    const double t6 = 2.0 * p.j() * p.q * z * r0;
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), std::abs(t5), std::abs(t6)});
    return {t1 + t2 + t3 + t4 + t5 + t6, scale};
}

} // namespace qes
