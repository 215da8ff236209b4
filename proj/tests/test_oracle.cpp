#include <qes/oracle.hpp>

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qes;

namespace {

MassProfile unit_mass(Domain d) { return MassProfile::from_text("1", {}, d); }

std::vector<double> harmonic(const Grid& g)
{
    std::vector<double> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = 0.5 * g.x(i) * g.x(i);
    return v;
}

struct SexticCase
{
    Grid grid{1e-3, 6.0, 2001};
    AlgebraParams params{0, 0, 1, 1};
    MassOrdering ordering{};
    MassProfile mass;
    MappingSample map;
    PotentialCurve V;

    explicit SexticCase(const std::string& mass_name = "constant", MassOrdering ord = {})
        : ordering(ord), mass(MassProfile::builtin(mass_name, {}, {0.0, 6.0}))
    {
        map = build_mapping(FamilySpec::sextic(), mass, grid, 1e-3);
        V = v_sextic(params, ordering, mass, map);
    }

    OracleResult solve(std::size_t k) const
    {
        const auto op = discretize_von_roos(mass, ordering, V.V, grid, true);
        return solve_bound_states(op, mass, k);
    }
};

} // namespace

TEST(Oracle, ParticleInABox)
{
    const double L = 1.0;
    const Grid g{0.0, L, 1001};
    const auto p = unit_mass(g.domain());
    const auto op = discretize_von_roos(p, {}, std::vector<double>(g.n, 0.0), g);
    // interior stencil is the standard -1/2 second difference
    const double h = g.h();
    EXPECT_NEAR(op.H.diag[5], 1.0 / (h * h), 1e-9);
    EXPECT_NEAR(op.H.off[5], -0.5 / (h * h), 1e-9);
    const auto res = solve_bound_states(op, p, 3);
    const double e1 = std::numbers::pi * std::numbers::pi / (2 * L * L);
    EXPECT_NEAR(res.states[0].eigenvalue, e1, 10 * e1 * h * h);
    EXPECT_NEAR(res.states[1].extrapolated / res.states[0].extrapolated, 4.0, 4e-3);
    EXPECT_NEAR(res.states[2].extrapolated / res.states[0].extrapolated, 9.0, 9e-3);
    for (int s = 0; s < 3; ++s) EXPECT_EQ(res.states[s].nodes, s);
}

TEST(Oracle, HarmonicOscillator)
{
    const Grid g{-10.0, 10.0, 2001};
    const auto p = unit_mass(g.domain());
    const auto res = solve_bound_states(discretize_von_roos(p, {}, harmonic(g), g), p, 4);
    ASSERT_TRUE(res.richardson);
    for (int s = 0; s < 3; ++s) {
        EXPECT_NEAR(res.states[s].eigenvalue, 0.5 + s, 1e-4);
        EXPECT_NEAR(res.states[s].extrapolated, 0.5 + s, 1e-7);
    }
    for (int s = 0; s < 3; ++s) {
        const double spacing = res.states[s + 1].extrapolated - res.states[s].extrapolated;
        EXPECT_NEAR(spacing, 1.0, 1e-3);
    }
    EXPECT_FALSE(res.boundary_truncated);
}

TEST(Oracle, OrderingInvarianceForConstantMass)
{
    const Grid g{-8.0, 8.0, 801};
    const auto p = MassProfile::from_text("2", {}, g.domain());
    prop::Gen gen(3);
    const auto ref = solve_bound_states(discretize_von_roos(p, {0, -1}, harmonic(g), g), p, 5).eigenvalues();
    const auto half = solve_bound_states(discretize_von_roos(p, {-0.5, 0}, harmonic(g), g), p, 5).eigenvalues();
    for (std::size_t s = 0; s < ref.size(); ++s) EXPECT_NEAR(ref[s], half[s], 1e-10);
    for (int trial = 0; trial < 10; ++trial) {
        const auto e = solve_bound_states(discretize_von_roos(p, gen.ordering(), harmonic(g), g), p, 5).eigenvalues();
        for (std::size_t s = 0; s < ref.size(); ++s) EXPECT_NEAR(ref[s], e[s], 1e-10);
    }
}

TEST(Oracle, OrderingMattersForVariableMass)
{
    const Grid g{-6.0, 6.0, 601};
    const auto p = MassProfile::builtin("rational2", {}, g.domain());
    const auto a = solve_bound_states(discretize_von_roos(p, {0, -1}, harmonic(g), g), p, 2).eigenvalues();
    const auto b = solve_bound_states(discretize_von_roos(p, {-0.5, 0}, harmonic(g), g), p, 2).eigenvalues();
    EXPECT_GT(std::abs(a[0] - b[0]), 1e-6);
}

TEST(Oracle, AssemblyIsSymmetricForAllOrderingsAndMasses)
{
    prop::Gen gen(17);
    const std::vector<std::pair<std::string, Domain>> masses = {
        {"constant", {-3, 3}}, {"rational2", {-3, 3}}, {"quadratic", {0.5, 3}}};
    for (const auto& [name, dom] : masses) {
        const Grid g{dom.lo, dom.hi, 301};
        const auto p = MassProfile::builtin(name, {}, dom);
        for (int trial = 0; trial < 20; ++trial) {
            const auto op = discretize_von_roos(p, gen.ordering(), harmonic(g), g);
            EXPECT_LE(op.asymmetry, 1e-14) << name;
        }
    }
}

TEST(Oracle, OscillationTheorem)
{
    const Grid g{-6.0, 6.0, 1201};
    const auto p = MassProfile::builtin("rational2", {}, g.domain());
    const auto res = solve_bound_states(discretize_von_roos(p, {-0.25, -0.5}, harmonic(g), g), p, 6);
    for (std::size_t s = 0; s < res.states.size(); ++s) EXPECT_EQ(res.states[s].nodes, static_cast<int>(s));
}

TEST(Oracle, SexticAlgebraicLevelsAppear)
{
    const SexticCase c;
    const auto res = c.solve(4);
    const double e = 2 * std::sqrt(1.5);
    EXPECT_NEAR(res.states[0].extrapolated, -e, 5e-3);
    EXPECT_NEAR(res.states[1].extrapolated, e, 5e-3);
    EXPECT_EQ(res.states[0].nodes, 0);
    EXPECT_EQ(res.states[1].nodes, 1);
    EXPECT_FALSE(res.boundary_truncated);
}

TEST(Oracle, InputErrors)
{
    const Grid g{0.0, 1.0, 21};
    const auto p = unit_mass(g.domain());
    std::vector<double> v(g.n, 0.0);
    v[7] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(discretize_von_roos(p, {}, v, g), InvalidArgument);
    v[7] = 0.0;
    v[0] = std::numeric_limits<double>::quiet_NaN(); // endpoints are not used
    EXPECT_NO_THROW(discretize_von_roos(p, {}, v, g));
    EXPECT_THROW(discretize_von_roos(p, {}, std::vector<double>(5, 0.0), g), InvalidArgument);
    const auto op = discretize_von_roos(p, {}, std::vector<double>(g.n, 0.0), g);
    EXPECT_THROW(solve_bound_states(op, p, 0), InvalidArgument);
}

TEST(Residual, SexticStateIsConsistent)
{
    // the two readings differ only for variable mass and alpha (alpha + beta + 1) != 0
    for (const std::string mass : {"constant", "rational2"}) {
        const SexticCase c(mass, mass == "constant" ? MassOrdering{} : MassOrdering{-0.5, 0});
        for (double eps : {-std::sqrt(1.5), std::sqrt(1.5)}) {
            const auto psi = assemble_psi(c.params, eps, c.map);
            const double E = e_sextic(c.params, eps);
            const auto r = residual_eq2(c.mass, c.ordering, c.V, E, psi.raw, c.grid);
            EXPECT_LT(r.max_rel_a, 1e-8) << mass;
            EXPECT_GT(r.evaluated, c.grid.n - 10);
            if (mass == "constant") {
                EXPECT_EQ(r.max_rel_a, r.max_rel_b);
                EXPECT_EQ(r.consistent_reading(1e-8), "both");
            } else {
                EXPECT_EQ(r.consistent_reading(1e-8), "A");
            }
        }
    }
}

TEST(Residual, DetectsWrongEnergy)
{
    const SexticCase c;
    const double eps = std::sqrt(1.5);
    const auto psi = assemble_psi(c.params, eps, c.map);
    const double E = e_sextic(c.params, eps);
    const auto base = residual_eq2(c.mass, c.ordering, c.V, E, psi.raw, c.grid);
    const auto off = residual_eq2(c.mass, c.ordering, c.V, E + 0.1, psi.raw, c.grid);
    const auto small = residual_eq2(c.mass, c.ordering, c.V, E + 1e-4, psi.raw, c.grid);
    EXPECT_GT(off.best(), 1e-3);
    EXPECT_GE(small.best(), 10 * base.best());
}

TEST(Residual, DetectsWrongEnergyForVariableMass)
{
    const SexticCase c("rational2", {-0.5, 0});
    const double eps = -std::sqrt(1.5);
    const auto psi = assemble_psi(c.params, eps, c.map);
    const double E = e_sextic(c.params, eps);
    const auto base = residual_eq2(c.mass, c.ordering, c.V, E, psi.raw, c.grid);
    const auto small = residual_eq2(c.mass, c.ordering, c.V, E + 1e-4, psi.raw, c.grid);
    EXPECT_LT(base.max_rel_a, 1e-8);
    EXPECT_GE(small.best(), 10 * base.best());
}

TEST(Residual, ReadingCoefficients)
{
    const MassOrdering o{-0.5, 0};
    EXPECT_DOUBLE_EQ(reading_a_coefficient(o), 2.0 * (1.0 - 0.25));
    EXPECT_DOUBLE_EQ(reading_b_coefficient(o), 2.0 - 0.25);
    const MassOrdering z{0, -1};
    EXPECT_EQ(reading_a_coefficient(z), reading_b_coefficient(z));
}

TEST(Residual, InputErrors)
{
    const SexticCase c;
    EXPECT_THROW(residual_eq2(c.mass, c.ordering, c.V, 0.0, std::vector<double>(c.grid.n, 0.0), c.grid),
                 InvalidArgument);
    const Grid tiny{1.0, 2.0, 6};
    EXPECT_THROW(residual_eq2(c.mass, c.ordering, c.V, 0.0, std::vector<double>(6, 1.0), tiny), InvalidArgument);
}
