#pragma once

#include <qes/error.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace qes::linalg {

/// Symmetric tridiagonal matrix: `diag` has n entries, `off` has n-1.
struct SymTridiagonal
{
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }
    double norm_inf() const noexcept
    {
        double best = 0.0;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            double row = std::abs(diag[i]);
            if (i > 0) row += std::abs(off[i - 1]);
            if (i + 1 < diag.size()) row += std::abs(off[i]);
            best = std::max(best, row);
        }
        return best;
    }
};

/// Dense row-major square matrix.
class DenseMatrix
{
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Number of eigenvalues strictly below `x` (Sturm sequence of the LDL^T pivots).
inline std::size_t sturm_count(const SymTridiagonal& t, double x)
{
    const std::size_t n = t.size();
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, t.norm_inf());
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

inline std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < t.size()) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return {lo - pad, hi + pad};
}

/// k-th smallest eigenvalue (0-based) by Sturm bisection.
inline double bisect_eigenvalue(const SymTridiagonal& t, std::size_t k, double abs_tol = 0.0)
{
    if (k >= t.size()) throw InvalidArgument("eigenvalue index out of range");
    auto [lo, hi] = gershgorin_bounds(t);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= std::max(abs_tol, 2.0 * eps * (std::abs(lo) + std::abs(hi))) || mid == lo || mid == hi)
            break;
        if (sturm_count(t, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// The `k` smallest eigenvalues, ascending.
inline std::vector<double> lowest_eigenvalues(const SymTridiagonal& t, std::size_t k, double abs_tol = 0.0)
{
    k = std::min(k, t.size());
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = bisect_eigenvalue(t, i, abs_tol);
    return out;
}

inline std::vector<double> all_eigenvalues(const SymTridiagonal& t, double abs_tol = 0.0)
{
    return lowest_eigenvalues(t, t.size(), abs_tol);
}

namespace detail {

// Solves (T - shift I) x = rhs in place with partial pivoting (the LAPACK
// gtsv elimination). Tiny pivots are replaced so the solve never divides by 0.
inline void shifted_solve(const SymTridiagonal& t, double shift, std::vector<double>& rhs)
{
    const std::size_t n = t.size();
    if (n == 1) {
        const double d0 = t.diag[0] - shift;
        rhs[0] /= (d0 != 0.0 ? d0 : std::numeric_limits<double>::epsilon());
        return;
    }
    std::vector<double> dl(t.off), d(n), du(t.off), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, t.norm_inf());

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (std::abs(d[i]) < tiny) d[i] = std::copysign(tiny, d[i] == 0.0 ? 1.0 : d[i]);
            const double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            rhs[i + 1] -= f * rhs[i];
            dl[i] = 0.0;
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if (std::abs(d[n - 1]) < tiny) d[n - 1] = tiny;

    rhs[n - 1] /= d[n - 1];
    if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    for (std::size_t ii = n - 2; ii-- > 0;) rhs[ii] = (rhs[ii] - du[ii] * rhs[ii + 1] - du2[ii] * rhs[ii + 2]) / d[ii];
}

inline double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double residual_norm(const SymTridiagonal& t, double lambda, const std::vector<double>& v)
{
    const std::size_t n = t.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = (t.diag[i] - lambda) * v[i];
        if (i > 0) r += t.off[i - 1] * v[i - 1];
        if (i + 1 < n) r += t.off[i] * v[i + 1];
        s += r * r;
    }
    return std::sqrt(s);
}

} // namespace detail

/// Unit eigenvector for a (simple) eigenvalue by inverse iteration. The sign is
/// fixed so that the first entry above 1e-8 of the maximum is positive.
inline std::vector<double> inverse_iteration(const SymTridiagonal& t, double lambda)
{
    const std::size_t n = t.size();
    const double scale = std::max(1.0, t.norm_inf());
    const double tol = 1e3 * std::numeric_limits<double>::epsilon() * scale;

    for (int attempt = 0; attempt < 3; ++attempt) {
        const double shift = lambda + (attempt == 0 ? 0.0 : std::ldexp(1.0, -40 + 10 * attempt) * scale);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * std::sin(0.7 * static_cast<double>(i) + 0.3);
        double nv = detail::norm2(v);
        for (double& x : v) x /= nv;

        for (int it = 0; it < 6; ++it) {
            detail::shifted_solve(t, shift, v);
            nv = detail::norm2(v);
            if (!std::isfinite(nv) || nv == 0.0) break;
            for (double& x : v) x /= nv;
            if (it >= 1 && detail::residual_norm(t, lambda, v) <= tol) {
                double vmax = 0.0;
                for (double x : v) vmax = std::max(vmax, std::abs(x));
                for (double x : v) {
                    if (std::abs(x) > 1e-8 * vmax) {
                        if (x < 0.0)
                            for (double& y : v) y = -y;
                        break;
                    }
                }
                return v;
            }
        }
    }
    throw NumericalError("inverse iteration failed to converge for eigenvalue " + std::to_string(lambda));
}

namespace detail {

// Parlett-Reinsch balancing with radix 2 (1-based storage a[i][j]).
inline void balance(std::vector<std::vector<double>>& a, std::size_t n)
{
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 1; i <= n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (j == i) continue;
                c += std::abs(a[j][i]);
                r += std::abs(a[i][j]);
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 1; j <= n; ++j) a[i][j] *= g;
                for (std::size_t j = 1; j <= n; ++j) a[j][i] *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elimination.
inline void hessenberg(std::vector<std::vector<double>>& a, std::size_t n)
{
    for (std::size_t m = 2; m < n; ++m) {
        double x = 0.0;
        std::size_t i = m;
        for (std::size_t j = m; j <= n; ++j) {
            if (std::abs(a[j][m - 1]) > std::abs(x)) {
                x = a[j][m - 1];
                i = j;
            }
        }
        if (i != m) {
            for (std::size_t j = m - 1; j <= n; ++j) std::swap(a[i][j], a[m][j]);
            for (std::size_t j = 1; j <= n; ++j) std::swap(a[j][i], a[j][m]);
        }
        if (x != 0.0) {
            for (i = m + 1; i <= n; ++i) {
                double y = a[i][m - 1];
                if (y == 0.0) continue;
                y /= x;
                a[i][m - 1] = y;
                for (std::size_t j = m; j <= n; ++j) a[i][j] -= y * a[m][j];
                for (std::size_t j = 1; j <= n; ++j) a[j][m] += y * a[j][i];
            }
        }
    }
    for (std::size_t i = 3; i <= n; ++i)
        for (std::size_t j = 1; j + 1 < i; ++j) a[i][j] = 0.0;
}

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (1-based).
inline std::vector<std::complex<double>> hessenberg_qr(std::vector<std::vector<double>>& a, std::size_t n)
{
    std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);
    double anorm = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = std::max<std::size_t>(i - 1, 1); j <= n; ++j) anorm += std::abs(a[i][j]);

    long nn = static_cast<long>(n);
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
    while (nn >= 1) {
        int its = 0;
        long l;
        do {
            for (l = nn; l >= 2; --l) {
                s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
                if (s == 0.0) s = anorm;
                if (std::abs(a[l][l - 1]) + s == s) {
                    a[l][l - 1] = 0.0;
                    break;
                }
            }
            x = a[nn][nn];
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn--] = 0.0;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -(wi[nn] = z);
                    }
                    nn -= 2;
                } else {
                    if (its == 60) throw NumericalError("Hessenberg QR iteration did not converge");
                    if (its == 10 || its == 20 || its == 40) {
                        t += x;
                        for (long i = 1; i <= nn; ++i) a[i][i] -= x;
                        s = std::abs(a[nn][nn - 1]) + std::abs(a[nn - 1][nn - 2]);
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    long m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a[m][m];
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a[m - 1][m - 1]) + std::abs(z) + std::abs(a[m + 1][m + 1]));
                        if (u + v == v) break;
                    }
                    for (long i = m + 2; i <= nn; ++i) {
                        a[i][i - 2] = 0.0;
                        if (i != m + 2) a[i][i - 3] = 0.0;
                    }
                    for (long k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if (k != nn - 1) r = a[k + 2][k - 1];
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a[k][k - 1] = -a[k][k - 1];
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (long j = k; j <= nn; ++j) {
                                p = a[k][j] + q * a[k + 1][j];
                                if (k != nn - 1) {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            const long mmin = nn < k + 3 ? nn : k + 3;
                            for (long i = l; i <= mmin; ++i) {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if (k != nn - 1) {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }

    std::vector<std::complex<double>> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
    return out;
}

} // namespace detail

/// All eigenvalues of a general real matrix (balance, Hessenberg, shifted QR).
inline std::vector<std::complex<double>> general_eigenvalues(const DenseMatrix& m)
{
    const std::size_t n = m.size();
    if (n == 0) return {};
    if (!m.all_finite()) throw InvalidArgument("matrix has non-finite entries");
    std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i + 1][j + 1] = m(i, j);
    detail::balance(a, n);
    detail::hessenberg(a, n);
    return detail::hessenberg_qr(a, n);
}

/// If `m` is tridiagonal with strictly positive products of paired
/// off-diagonals, returns the symmetric matrix it is diagonally similar to.
inline bool symmetrize_tridiagonal(const DenseMatrix& m, SymTridiagonal& out)
{
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((i > j + 1 || j > i + 1) && m(i, j) != 0.0) return false;
    out.diag.assign(n, 0.0);
    out.off.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) out.diag[i] = m(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double prod = m(i, i + 1) * m(i + 1, i);
        if (!(prod > 0.0)) return false;
        out.off[i] = std::sqrt(prod);
    }
    return true;
}

enum class EigenMethod
{
    Auto,    ///< symmetrizable tridiagonal -> Sturm bisection, otherwise Hessenberg QR
    General, ///< always Hessenberg QR
};

/// Real eigenvalues, ascending. Throws if any eigenvalue has an imaginary part
/// larger than `tol_imag` times the spectral scale.
inline std::vector<double> matrix_eigenvalues(const DenseMatrix& m, EigenMethod method = EigenMethod::Auto,
                                              double tol_imag = 1e-9)
{
    if (!m.all_finite()) throw InvalidArgument("matrix has non-finite entries");
    SymTridiagonal sym;
    if (method == EigenMethod::Auto && m.size() > 0 && symmetrize_tridiagonal(m, sym)) return all_eigenvalues(sym);

    const auto ev = general_eigenvalues(m);
    double scale = 1.0;
    for (const auto& z : ev) scale = std::max(scale, std::abs(z));
    std::vector<double> out;
    out.reserve(ev.size());
    for (const auto& z : ev) {
        if (std::abs(z.imag()) > tol_imag * scale)
            throw NumericalError("complex eigenvalue " + std::to_string(z.real()) + (z.imag() < 0 ? " - " : " + ") +
                                 std::to_string(std::abs(z.imag())) + "i");
        out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace qes::linalg
