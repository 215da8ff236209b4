#pragma once

#include <qes/error.hpp>

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace qes {

/// Neumaier variant of Kahan summation.
class CompensatedSum
{
public:
    CompensatedSum& operator+=(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Composite Simpson rule for a callable on [a, b] with `panels` double-panels.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels)
{
    if (panels == 0) panels = 1;
    const std::size_t n = 2 * panels;
    const double h = (b - a) / static_cast<double>(n);
    CompensatedSum s;
    s += f(a);
    s += f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
    return s.value() * h / 3.0;
}

/// Cumulative integral of uniformly sampled data, zero at the first sample.
///
/// Pairs of intervals use Simpson's rule; each odd-indexed sample gets the
/// three-point single-interval rule so that every output is fourth-order
/// locally. The last interval of an even-length series uses the mirrored rule.
inline std::vector<double> cumulative_simpson(std::span<const double> f, double h)
{
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n == 2) {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    for (std::size_t i = 1; i < n; ++i) {
        double step;
        if (i + 1 < n)
            step = h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        else
            step = h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
        if (i % 2 == 0 && i >= 2) {
            // Simpson over [i-2, i] replaces the two single-interval steps.
            out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        } else {
            out[i] = out[i - 1] + step;
        }
    }
    return out;
}

/// Trapezoid integral over samples [first, last] inclusive.
inline double trapezoid(std::span<const double> f, double h, std::size_t first, std::size_t last)
{
    CompensatedSum s;
    for (std::size_t i = first; i < last; ++i) s += 0.5 * h * (f[i] + f[i + 1]);
    return s.value();
}

/// Round-trip formatting with 17 significant digits.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline bool is_half_integer(double v, double tol = 1e-12)
{
    return std::abs(2.0 * v - std::round(2.0 * v)) <= tol;
}

} // namespace qes
