#pragma once

// Independent numerical checks: a finite-difference discretization of the
// von Roos Hamiltonian in product form, and the pointwise residual of the
// expanded second-order equation for a given (m, V, E, psi).

#include <qes/error.hpp>
#include <qes/linalg.hpp>
#include <qes/mapping.hpp>
#include <qes/mass_profile.hpp>
#include <qes/potentials.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace qes {

/// H = (1/4)(m^a p m^b p m^c + m^c p m^b p m^a) + V on the interior nodes of
/// a uniform grid, Dirichlet at both ends. m^a and m^c are sampled at nodes,
/// m^b at midpoints.
struct DiscretizedOperator
{
    linalg::SymTridiagonal H;
    Grid grid;
    MassOrdering ordering;
    std::vector<double> V; ///< full grid, including the two boundary nodes
    bool left_natural_zero = false; ///< left end is a physical zero of psi (radial origin)
    double asymmetry = 0.0;         ///< max |H_ij - H_ji| / scale found during assembly
};

inline DiscretizedOperator discretize_von_roos(const MassProfile& p, const MassOrdering& ord,
                                               const std::vector<double>& V, const Grid& g,
                                               bool left_natural_zero = false)
{
    g.validate();
    ord.validate();
    if (V.size() != g.n) throw InvalidArgument("potential samples do not match the grid");
    for (std::size_t i = 1; i + 1 < g.n; ++i)
        if (!std::isfinite(V[i]))
            throw InvalidArgument("potential is missing at interior point x = " + format_double(g.x(i)));

    const std::size_t n = g.n;
    const double h = g.h();
    std::vector<double> A(n), C(n), B(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = eval_profile(p, g.x(i)).m;
        A[i] = std::pow(m, ord.alpha);
        C[i] = std::pow(m, ord.gamma());
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double xm = 0.5 * (g.x(i) + g.x(i + 1));
        const double m = p.mass(xm);
        if (!(m > 0.0) || !std::isfinite(m))
            throw InvalidArgument("mass is not positive at midpoint x = " + format_double(xm));
        B[i] = std::pow(m, ord.beta);
    }

    DiscretizedOperator op{{}, g, ord, V, left_natural_zero, 0.0};
    const std::size_t N = n - 2;
    op.H.diag.resize(N);
    op.H.off.resize(N - 1);
    const double inv_h2 = 1.0 / (h * h);
    double scale = 0.0, asym = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t i = k + 1;
        op.H.diag[k] = 0.5 * A[i] * C[i] * (B[i - 1] + B[i]) * inv_h2 + V[i];
        scale = std::max(scale, std::abs(op.H.diag[k]));
        if (k + 1 < N) {
            const double upper = -0.25 * (A[i] * C[i + 1] + C[i] * A[i + 1]) * B[i] * inv_h2;
            const double lower = -0.25 * (A[i + 1] * C[i] + C[i + 1] * A[i]) * B[i] * inv_h2;
            asym = std::max(asym, std::abs(upper - lower));
            op.H.off[k] = 0.5 * (upper + lower);
            scale = std::max(scale, std::abs(upper));
        }
    }
    op.asymmetry = scale > 0.0 ? asym / scale : 0.0;
    if (op.asymmetry > 1e-14) throw NumericalError("assembled operator is not symmetric");
    return op;
}

struct BoundState
{
    double eigenvalue = 0.0;     ///< fine-grid value
    double extrapolated = 0.0;   ///< Richardson value (fine value when no coarse solve)
    double coarse = 0.0;
    int nodes = 0;
    std::vector<double> vector; ///< full grid, zero at the Dirichlet ends
    double edge_ratio = 0.0;    ///< largest |psi| next to a non-natural boundary over max |psi|
    double edge_left = 0.0;     ///< same, left end only (0 at a natural zero)
    double edge_right = 0.0;
};

struct OracleResult
{
    std::vector<BoundState> states; ///< ascending
    Grid grid;
    bool richardson = false;
    bool boundary_truncated = false;
    bool truncated_left = false;
    bool truncated_right = false;
    double max_convergence_delta = 0.0; ///< max |E_fine - E_coarse|

    std::vector<double> eigenvalues() const
    {
        std::vector<double> v;
        for (const auto& s : states) v.push_back(s.extrapolated);
        return v;
    }
};

inline constexpr double boundary_tolerance = 1e-8;

namespace detail {

inline DiscretizedOperator coarsen(const DiscretizedOperator& op, const MassProfile& p)
{
    const Grid cg = op.grid.coarse();
    std::vector<double> V(cg.n);
    for (std::size_t i = 0; i < cg.n; ++i) V[i] = op.V[2 * i];
    return discretize_von_roos(p, op.ordering, V, cg, op.left_natural_zero);
}

} // namespace detail

/// k lowest eigenpairs by Sturm bisection and inverse iteration; when the
/// grid has an odd point count the every-other-point grid is solved too and
/// E_R = (4 E_fine - E_coarse) / 3 is reported.
inline OracleResult solve_bound_states(const DiscretizedOperator& op, const MassProfile& p, std::size_t k)
{
    const std::size_t N = op.H.size();
    if (k == 0) throw InvalidArgument("requested zero eigenvalues");
    k = std::min(k, N);
    OracleResult res;
    res.grid = op.grid;
    const auto fine = linalg::lowest_eigenvalues(op.H, k);

    std::optional<std::vector<double>> coarse;
    if (op.grid.n % 2 == 1 && op.grid.coarse().n >= Grid::min_points) {
        const auto cop = detail::coarsen(op, p);
        const std::size_t kc = std::min(k, cop.H.size());
        coarse = linalg::lowest_eigenvalues(cop.H, kc);
        res.richardson = true;
    }

    for (std::size_t s = 0; s < k; ++s) {
        BoundState st;
        st.eigenvalue = fine[s];
        st.extrapolated = fine[s];
        st.coarse = fine[s];
        if (coarse && s < coarse->size()) {
            st.coarse = (*coarse)[s];
            st.extrapolated = (4.0 * fine[s] - st.coarse) / 3.0;
            res.max_convergence_delta = std::max(res.max_convergence_delta, std::abs(fine[s] - st.coarse));
        }
        const auto v = linalg::inverse_iteration(op.H, fine[s]);
        st.vector.assign(op.grid.n, 0.0);
        std::copy(v.begin(), v.end(), st.vector.begin() + 1);
        st.nodes = count_nodes(st.vector);
        double peak = 0.0;
        for (double x : v) peak = std::max(peak, std::abs(x));
        if (peak > 0.0) {
            st.edge_left = op.left_natural_zero ? 0.0 : std::abs(v.front()) / peak;
            st.edge_right = std::abs(v.back()) / peak;
        }
        st.edge_ratio = std::max(st.edge_left, st.edge_right);
        res.states.push_back(std::move(st));
    }
    return res;
}

/// Pointwise residual of
///   -psi''/(2m) + m' psi'/(2m^2) + [(1+b) m m'' - c2 m'^2]/(4 m^3) psi + (V - E) psi = 0
/// for both readings of c2: 2(b + 1 + a(a+b+1)) and 2(b + 1) + a(a+b+1).
struct Eq2Residual
{
    double max_rel_a = 0.0; ///< reading c2 = 2(b + 1 + a(a+b+1))
    double max_rel_b = 0.0; ///< reading c2 = 2(b + 1) + a(a+b+1)
    std::vector<double> profile_a; ///< NaN where not evaluated
    std::vector<double> profile_b;
    double scale = 0.0;
    std::size_t evaluated = 0;

    double best() const noexcept { return std::min(max_rel_a, max_rel_b); }
    /// "both" when the readings coincide for this ordering and mass.
    std::string consistent_reading(double tol) const
    {
        const bool a = max_rel_a < tol, b = max_rel_b < tol;
        if (a && b) return "both";
        if (a) return "A";
        if (b) return "B";
        return "none";
    }
};

inline double reading_a_coefficient(const MassOrdering& o) { return 2.0 * (o.beta + 1.0 + o.alpha_product()); }
inline double reading_b_coefficient(const MassOrdering& o) { return 2.0 * (o.beta + 1.0) + o.alpha_product(); }

inline Eq2Residual residual_eq2(const MassProfile& p, const MassOrdering& ord, const PotentialCurve& V, double E,
                                const std::vector<double>& psi, const Grid& g)
{
    if (g.n < 7 || psi.size() < 7) throw InvalidArgument("residual check needs at least 7 grid points");
    if (psi.size() != g.n || V.size() != g.n) throw InvalidArgument("residual inputs do not match the grid");
    if (std::all_of(psi.begin(), psi.end(), [](double v) { return v == 0.0; }))
        throw InvalidArgument("wavefunction is identically zero");

    const double h = g.h();
    const std::size_t n = g.n;
    std::vector<bool> skip(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < 3 || i + 3 >= n) skip[i] = true;
        if (!V.retained(i) || !std::isfinite(psi[i]))
            for (std::size_t k = (i >= 2 ? i - 2 : 0); k <= std::min(n - 1, i + 2); ++k) skip[k] = true;
    }

    const double ca = reading_a_coefficient(ord), cb = reading_b_coefficient(ord);
    Eq2Residual out;
    out.profile_a.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.profile_b.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> raw_a(n, 0.0), raw_b(n, 0.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (skip[i]) continue;
        const auto mv = eval_profile(p, g.x(i));
        const double m = mv.m, dm = mv.dm, d2m = mv.d2m;
        const double d1 = (-psi[i + 2] + 8.0 * psi[i + 1] - 8.0 * psi[i - 1] + psi[i - 2]) / (12.0 * h);
        const double d2 =
            (-psi[i + 2] + 16.0 * psi[i + 1] - 30.0 * psi[i] + 16.0 * psi[i - 1] - psi[i - 2]) / (12.0 * h * h);
        const double kinetic = -d2 / (2.0 * m);
        const double drift = dm * d1 / (2.0 * m * m);
        const double curv = (1.0 + ord.beta) * m * d2m * psi[i] / (4.0 * m * m * m);
        const double grad_a = -ca * dm * dm * psi[i] / (4.0 * m * m * m);
        const double grad_b = -cb * dm * dm * psi[i] / (4.0 * m * m * m);
        const double pot = V.V[i] * psi[i];
        const double en = E * psi[i];
        raw_a[i] = kinetic + drift + curv + grad_a + pot - en;
        raw_b[i] = kinetic + drift + curv + grad_b + pot - en;
        scale = std::max({scale, std::abs(kinetic), std::abs(drift), std::abs(curv), std::abs(grad_a),
                          std::abs(grad_b), std::abs(pot), std::abs(en)});
        ++out.evaluated;
    }
    if (out.evaluated == 0) throw InvalidArgument("no interior point left for the residual check");
    if (!(scale > 0.0)) throw InvalidArgument("all residual terms vanish");
    out.scale = scale;
    for (std::size_t i = 0; i < n; ++i) {
        if (skip[i]) continue;
        out.profile_a[i] = raw_a[i] / scale;
        out.profile_b[i] = raw_b[i] / scale;
        out.max_rel_a = std::max(out.max_rel_a, std::abs(out.profile_a[i]));
        out.max_rel_b = std::max(out.max_rel_b, std::abs(out.profile_b[i]));
    }
    return out;
}

} // namespace qes
