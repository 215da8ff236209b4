#include <qes/linalg.hpp>

#include "generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace qes;
using namespace qes::linalg;

namespace {

SymTridiagonal laplacian(std::size_t n)
{
    return {std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
}

} // namespace

TEST(Linalg, SturmCountMatchesKnownSpectrum)
{
    // eigenvalues of the 1D Laplacian: 2 - 2 cos(k pi / (n+1))
    const std::size_t n = 50;
    const auto t = laplacian(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double lam = 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1));
        EXPECT_EQ(sturm_count(t, lam - 1e-9), k - 1);
        EXPECT_EQ(sturm_count(t, lam + 1e-9), k);
    }
}

TEST(Linalg, BisectionReachesMachinePrecision)
{
    const std::size_t n = 200;
    const auto t = laplacian(n);
    const auto ev = all_eigenvalues(t);
    ASSERT_EQ(ev.size(), n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
        EXPECT_NEAR(ev[k], lam, 1e-13);
    }
    EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
}

TEST(Linalg, LowestEigenvaluesPrefix)
{
    const auto t = laplacian(30);
    const auto all = all_eigenvalues(t);
    const auto low = lowest_eigenvalues(t, 4);
    ASSERT_EQ(low.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(low[k], all[k]);
}

TEST(Linalg, InverseIterationGivesEigenvector)
{
    const std::size_t n = 40;
    const auto t = laplacian(n);
    const auto ev = lowest_eigenvalues(t, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto v = inverse_iteration(t, ev[k]);
        EXPECT_LT(linalg::detail::residual_norm(t, ev[k], v), 1e-10);
        EXPECT_NEAR(linalg::detail::norm2(v), 1.0, 1e-12);
        // first significant entry is positive
        const auto it = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-8; });
        ASSERT_NE(it, v.end());
        EXPECT_GT(*it, 0.0);
    }
}

TEST(Linalg, InverseIterationOneByOne)
{
    const SymTridiagonal t{{3.0}, {}};
    const auto v = inverse_iteration(t, 3.0);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_DOUBLE_EQ(v[0], 1.0);
}

TEST(Linalg, GeneralEigenvaluesTwoByTwo)
{
    DenseMatrix m(2);
    m(0, 1) = 1.5;
    m(1, 0) = 1.0;
    const auto ev = matrix_eigenvalues(m, EigenMethod::General);
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_NEAR(ev[0], -std::sqrt(1.5), 1e-14);
    EXPECT_NEAR(ev[1], std::sqrt(1.5), 1e-14);
}

TEST(Linalg, IdentityEigenvalues)
{
    const auto ev = matrix_eigenvalues(DenseMatrix::identity(3));
    ASSERT_EQ(ev.size(), 3u);
    for (double e : ev) EXPECT_DOUBLE_EQ(e, 1.0);
}

TEST(Linalg, ComplexEigenvaluesAreRejected)
{
    DenseMatrix rot(2);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    EXPECT_THROW(matrix_eigenvalues(rot), NumericalError);
}

TEST(Linalg, NonFiniteMatrixRejected)
{
    DenseMatrix m(2);
    m(0, 0) = std::nan("");
    EXPECT_THROW(matrix_eigenvalues(m), Error);
}

TEST(Linalg, SymmetrizationRequiresPositivePairs)
{
    DenseMatrix m(3);
    m(0, 1) = 2.0;
    m(1, 0) = 0.5;
    m(1, 2) = 3.0;
    m(2, 1) = 3.0;
    SymTridiagonal t;
    ASSERT_TRUE(symmetrize_tridiagonal(m, t));
    EXPECT_DOUBLE_EQ(t.off[0], 1.0);
    EXPECT_DOUBLE_EQ(t.off[1], 3.0);
    m(1, 0) = -0.5;
    EXPECT_FALSE(symmetrize_tridiagonal(m, t));
}

TEST(Linalg, PropertyTridiagonalPathsAgree)
{
    // Random non-symmetric tridiagonal with positive pair products: Sturm and
    // Hessenberg QR see the same spectrum.
    prop::Gen gen(20240611);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = gen.integer(1, 12);
        DenseMatrix m(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            m(i, i) = gen.uniform(-5.0, 5.0);
            if (i + 1 < n) {
                const double s = gen.coin() ? 1.0 : -1.0;
                m(i, i + 1) = s * gen.uniform(0.1, 3.0);
                m(i + 1, i) = s * gen.uniform(0.1, 3.0);
            }
        }
        const auto a = matrix_eigenvalues(m, EigenMethod::Auto);
        const auto b = matrix_eigenvalues(m, EigenMethod::General);
        ASSERT_EQ(a.size(), b.size());
        double scale = 1.0;
        for (double v : a) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-11 * scale) << "trial " << trial;
    }
}
