#ifndef RVM_PHASE_GRID_HPP
#define RVM_PHASE_GRID_HPP

#include "rvm/kinematics.hpp"
#include "rvm/reduce.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rvm {

inline constexpr double infinity_norm = std::numeric_limits<double>::infinity();

/// Uniform phase-space grid: periodic x on [0, lx), and one or two momentum
/// axes truncated to [-xi_max, xi_max] with cell-centred nodes.
///
/// Storage order is x-major, then xi_1, then xi_2:
///   flat = (ix * n1 + j1) * n2 + j2
/// Snapshot files use the same order.
struct PhaseGrid {
    std::size_t nx = 0;
    double lx = 0.0;
    std::vector<std::size_t> nxi;
    double xi_max = 0.0;

    PhaseGrid() = default;
    PhaseGrid(std::size_t nx_, double lx_, std::vector<std::size_t> nxi_, double xi_max_)
        : nx(nx_)
        , lx(lx_)
        , nxi(std::move(nxi_))
        , xi_max(xi_max_)
    {
        if (nx == 0)
            throw std::invalid_argument("PhaseGrid: nx must be positive");
        if (!(lx > 0.0) || !std::isfinite(lx))
            throw std::invalid_argument("PhaseGrid: lx must be positive");
        if (nxi.empty() || nxi.size() > 2)
            throw std::invalid_argument("PhaseGrid: one or two momentum dimensions required");
        for (auto n : nxi)
            if (n == 0)
                throw std::invalid_argument("PhaseGrid: momentum resolution must be positive");
        if (!(xi_max > 0.0) || !std::isfinite(xi_max))
            throw std::invalid_argument("PhaseGrid: xi_max must be positive");
    }

    std::size_t xi_dims() const { return nxi.size(); }
    std::size_t n1() const { return nxi[0]; }
    std::size_t n2() const { return nxi.size() == 2 ? nxi[1] : 1; }
    std::size_t xi_size() const { return n1() * n2(); }
    std::size_t size() const { return nx * xi_size(); }

    double dx() const { return lx / static_cast<double>(nx); }
    double dxi(std::size_t axis) const { return 2.0 * xi_max / static_cast<double>(nxi.at(axis)); }
    double xi_extent() const { return 2.0 * xi_max; }

    double xi_cell_volume() const
    {
        double vol = 1.0;
        for (std::size_t a = 0; a < xi_dims(); ++a)
            vol *= dxi(a);
        return vol;
    }
    double cell_volume() const { return dx() * xi_cell_volume(); }
    double xi_domain_volume() const { return std::pow(xi_extent(), static_cast<double>(xi_dims())); }

    double x(std::size_t ix) const { return static_cast<double>(ix) * dx(); }
    double xi_node(std::size_t axis, std::size_t j) const
    {
        return -xi_max + (static_cast<double>(j) + 0.5) * dxi(axis);
    }

    std::size_t index(std::size_t ix, std::size_t jxi) const { return ix * xi_size() + jxi; }
    std::size_t xi_index(std::size_t j1, std::size_t j2) const { return j1 * n2() + j2; }

    /// Momentum at flat momentum index; the second component is 0 in 1D1V.
    Momentum<2> momentum(std::size_t jxi) const
    {
        const std::size_t j1 = jxi / n2();
        const std::size_t j2 = jxi % n2();
        return {xi_node(0, j1), xi_dims() == 2 ? xi_node(1, j2) : 0.0};
    }

    bool on_xi_boundary(std::size_t jxi) const
    {
        const std::size_t j1 = jxi / n2();
        const std::size_t j2 = jxi % n2();
        const bool b1 = j1 == 0 || j1 + 1 == n1();
        const bool b2 = xi_dims() == 2 && (j2 == 0 || j2 + 1 == n2());
        return b1 || b2;
    }

    bool operator==(const PhaseGrid&) const = default;
};

/// Lorentz factor and velocity tabulated on the momentum nodes.
struct KinematicTable {
    std::vector<double> gamma;
    std::vector<double> vx;
    std::vector<double> vy;

    explicit KinematicTable(const PhaseGrid& grid)
        : gamma(grid.xi_size())
        , vx(grid.xi_size())
        , vy(grid.xi_size())
    {
        for (std::size_t j = 0; j < grid.xi_size(); ++j) {
            const auto xi = grid.momentum(j);
            const auto v = velocity(xi);
            gamma[j] = rvm::gamma(xi);
            vx[j] = v[0];
            vy[j] = v[1];
        }
    }
};

/// Gridded phase-space density f(x, xi).
struct DistField {
    PhaseGrid grid;
    std::vector<double> values;

    DistField() = default;
    explicit DistField(PhaseGrid g, double fill = 0.0)
        : grid(std::move(g))
        , values(grid.size(), fill)
    {}
    DistField(PhaseGrid g, std::vector<double> v)
        : grid(std::move(g))
        , values(std::move(v))
    {
        if (values.size() != grid.size())
            throw std::invalid_argument("DistField: value count does not match grid");
    }

    double& operator()(std::size_t ix, std::size_t jxi) { return values[grid.index(ix, jxi)]; }
    double operator()(std::size_t ix, std::size_t jxi) const { return values[grid.index(ix, jxi)]; }

    std::span<double> slice(std::size_t ix) { return {values.data() + grid.index(ix, 0), grid.xi_size()}; }
    std::span<const double> slice(std::size_t ix) const
    {
        return {values.data() + grid.index(ix, 0), grid.xi_size()};
    }

    bool operator==(const DistField&) const = default;
};

/// Electromagnetic field (Ex, Ey, Bz) on the spatial nodes. In 1D1V runs Ey
/// and Bz are kept identically zero.
struct EMField {
    std::vector<double> ex;
    std::vector<double> ey;
    std::vector<double> bz;

    EMField() = default;
    explicit EMField(std::size_t nx)
        : ex(nx, 0.0)
        , ey(nx, 0.0)
        , bz(nx, 0.0)
    {}

    FieldValue at(std::size_t ix) const { return {ex[ix], ey[ix], bz[ix]}; }
    bool operator==(const EMField&) const = default;
};

struct RVMState {
    double t = 0.0;
    DistField f;
    EMField em;

    RVMState() = default;
    RVMState(double t_, DistField f_, EMField em_)
        : t(t_)
        , f(std::move(f_))
        , em(std::move(em_))
    {
        if (em.ex.size() != f.grid.nx || em.ey.size() != f.grid.nx || em.bz.size() != f.grid.nx)
            throw std::invalid_argument("RVMState: field length does not match grid");
    }

    const PhaseGrid& grid() const { return f.grid; }
    bool operator==(const RVMState&) const = default;
};

/// Entropy function H with derivative H'.
struct EntropyFn {
    std::string name;
    std::function<double(double)> h;
    std::function<double(double)> dh;
    bool requires_nonnegative = false;
    /// H nondecreasing with H(s)/s -> infinity (the superlinear entropy class).
    bool superlinear = false;
};

inline EntropyFn entropy_square()
{
    return {"square", [](double s) { return s * s; }, [](double s) { return 2.0 * s; }, false, true};
}

/// (1 + s) ln(1 + s) - s, defined for s >= 0.
inline EntropyFn entropy_log()
{
    return {"log",
            [](double s) { return (1.0 + s) * std::log1p(s) - s; },
            [](double s) { return std::log1p(s); },
            true,
            true};
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// rho(x) = int f dxi (midpoint rule).
inline std::vector<double> density(const DistField& f)
{
    const auto& g = f.grid;
    std::vector<double> rho(g.nx);
    const double vol = g.xi_cell_volume();
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        rho[ix] = pairwise_sum(f.slice(ix)) * vol;
    return rho;
}

struct CurrentDensity {
    std::vector<double> jx;
    std::vector<double> jy;
};

/// j(x) = int v f dxi.
inline CurrentDensity current(const DistField& f)
{
    const auto& g = f.grid;
    const KinematicTable kin(g);
    CurrentDensity j{std::vector<double>(g.nx), std::vector<double>(g.nx)};
    const double vol = g.xi_cell_volume();
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const auto s = f.slice(ix);
        j.jx[ix] = pairwise_sum_by(s.size(), [&](std::size_t k) { return kin.vx[k] * s[k]; }) * vol;
        j.jy[ix] = pairwise_sum_by(s.size(), [&](std::size_t k) { return kin.vy[k] * s[k]; }) * vol;
    }
    return j;
}

/// Particle kinetic energy density int gamma f dxi.
inline std::vector<double> kinetic_energy_density(const DistField& f)
{
    const auto& g = f.grid;
    const KinematicTable kin(g);
    std::vector<double> e(g.nx);
    const double vol = g.xi_cell_volume();
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const auto s = f.slice(ix);
        e[ix] = pairwise_sum_by(s.size(), [&](std::size_t k) { return kin.gamma[k] * s[k]; }) * vol;
    }
    return e;
}

/// Particle energy flux int gamma v_x f dxi (= int xi_x f dxi).
inline std::vector<double> kinetic_energy_flux(const DistField& f)
{
    const auto& g = f.grid;
    const KinematicTable kin(g);
    std::vector<double> q(g.nx);
    const double vol = g.xi_cell_volume();
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const auto s = f.slice(ix);
        q[ix] = pairwise_sum_by(s.size(), [&](std::size_t k) { return kin.gamma[k] * kin.vx[k] * s[k]; }) * vol;
    }
    return q;
}

inline double mass(const DistField& f) { return pairwise_sum(f.values) * f.grid.cell_volume(); }

struct EnergyBudget {
    double kinetic = 0.0;            ///< int gamma f
    double kinetic_minus_rest = 0.0; ///< int (gamma - 1) f
    double field = 0.0;              ///< 1/2 int (Ex^2 + Ey^2 + Bz^2)
    double total = 0.0;              ///< kinetic + field
    double total_minus_rest = 0.0;   ///< kinetic_minus_rest + field
};

inline double field_energy(const EMField& em, double dx)
{
    const std::size_t n = em.ex.size();
    return 0.5 * dx * pairwise_sum_by(n, [&](std::size_t i) {
               return em.ex[i] * em.ex[i] + em.ey[i] * em.ey[i] + em.bz[i] * em.bz[i];
           });
}

/// sum_{ix, j} w[j] f(ix, j) with per-slice pairwise sums.
inline double weighted_sum(const DistField& f, std::span<const double> w)
{
    const auto& g = f.grid;
    std::vector<double> rows(g.nx);
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        const auto s = f.slice(ix);
        rows[ix] = pairwise_sum_by(s.size(), [&](std::size_t j) { return w[j] * s[j]; });
    }
    return pairwise_sum(rows);
}

inline EnergyBudget total_energy(const RVMState& state)
{
    const auto& g = state.grid();
    const KinematicTable kin(g);
    std::vector<double> gm1(kin.gamma.size());
    for (std::size_t j = 0; j < gm1.size(); ++j)
        gm1[j] = kin.gamma[j] - 1.0;
    EnergyBudget e;
    e.kinetic = weighted_sum(state.f, kin.gamma) * g.cell_volume();
    e.kinetic_minus_rest = weighted_sum(state.f, gm1) * g.cell_volume();
    e.field = field_energy(state.em, g.dx());
    e.total = e.kinetic + e.field;
    e.total_minus_rest = e.kinetic_minus_rest + e.field;
    return e;
}

/// Discrete L^p norm with a uniform cell weight; p = infinity_norm gives max |v|.
inline double lp_norm(std::span<const double> values, double cell_volume, double p)
{
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: exponent must satisfy p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values)
            m = std::max(m, std::abs(v));
        return m;
    }
    if (p == 1.0)
        return pairwise_sum_by(values.size(), [&](std::size_t i) { return std::abs(values[i]); }) * cell_volume;
    if (p == 2.0)
        return std::sqrt(pairwise_sum_by(values.size(), [&](std::size_t i) { return values[i] * values[i]; }) *
                         cell_volume);
    const double s = pairwise_sum_by(values.size(), [&](std::size_t i) { return std::pow(std::abs(values[i]), p); });
    return std::pow(s * cell_volume, 1.0 / p);
}

inline double lp_norm(const DistField& f, double p) { return lp_norm(f.values, f.grid.cell_volume(), p); }

/// Mixed norm L^p_xi(L^r_x): inner L^r over x at each momentum node, then outer
/// L^p over momentum. The order is fixed.
inline double mixed_norm(const DistField& f, double p_xi, double r_x)
{
    if (!(p_xi >= 1.0) || !(r_x >= 1.0))
        throw std::invalid_argument("mixed_norm: exponents must be >= 1");
    const auto& g = f.grid;
    const std::size_t nxi = g.xi_size();
    std::vector<double> inner(nxi);
    std::vector<double> column(g.nx);
    for (std::size_t j = 0; j < nxi; ++j) {
        for (std::size_t ix = 0; ix < g.nx; ++ix)
            column[ix] = f.values[g.index(ix, j)];
        inner[j] = lp_norm(column, g.dx(), r_x);
    }
    return lp_norm(inner, g.xi_cell_volume(), p_xi);
}

/// int int H(f) dxi dx.
inline double entropy_integral(const DistField& f, const EntropyFn& entropy)
{
    if (entropy.requires_nonnegative)
        for (double v : f.values)
            if (v < 0.0)
                throw std::domain_error("entropy_integral: entropy '" + entropy.name +
                                        "' requires a nonnegative field");
    const auto& v = f.values;
    return pairwise_sum_by(v.size(), [&](std::size_t k) { return entropy.h(v[k]); }) * f.grid.cell_volume();
}

/// Total momentum: int int xi f plus the field momentum int E x B.
/// For E = (Ex, Ey, 0) and B = (0, 0, Bz), E x B = (Ey Bz, -Ex Bz).
inline std::array<double, 2> momentum_total(const RVMState& state)
{
    const auto& g = state.grid();
    const std::size_t nxi = g.xi_size();
    std::vector<double> xi1(nxi), xi2(nxi);
    for (std::size_t j = 0; j < nxi; ++j) {
        const auto m = g.momentum(j);
        xi1[j] = m[0];
        xi2[j] = m[1];
    }
    const double vol = g.cell_volume();
    const double p1 = weighted_sum(state.f, xi1) * vol;
    const double p2 = weighted_sum(state.f, xi2) * vol;
    const auto& em = state.em;
    const double dx = g.dx();
    const double f1 = pairwise_sum_by(g.nx, [&](std::size_t i) { return em.ey[i] * em.bz[i]; }) * dx;
    const double f2 = -pairwise_sum_by(g.nx, [&](std::size_t i) { return em.ex[i] * em.bz[i]; }) * dx;
    return {p1 + f1, p2 + f2};
}

/// Largest |f| on the outermost momentum cells; stands in for the decay
/// assumption behind the momentum cutoff.
inline double xi_boundary_max(const DistField& f)
{
    const auto& g = f.grid;
    double m = 0.0;
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        for (std::size_t j = 0; j < g.xi_size(); ++j)
            if (g.on_xi_boundary(j))
                m = std::max(m, std::abs(f(ix, j)));
    return m;
}

/// Scalar functionals tracked over a run (one row of the budget CSV).
struct ConservationSample {
    double t = 0.0;
    double mass = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double entropy_sq = 0.0;
    double kinetic = 0.0;
    double field = 0.0;
    double total = 0.0;
    double px = 0.0;
    double py = 0.0;
};

inline ConservationSample sample_conservation(const RVMState& state)
{
    ConservationSample s;
    s.t = state.t;
    s.mass = mass(state.f);
    s.l1 = lp_norm(state.f, 1.0);
    s.l2 = lp_norm(state.f, 2.0);
    s.linf = lp_norm(state.f, infinity_norm);
    s.entropy_sq = entropy_integral(state.f, entropy_square());
    const auto e = total_energy(state);
    s.kinetic = e.kinetic;
    s.field = e.field;
    s.total = e.total;
    const auto p = momentum_total(state);
    s.px = p[0];
    s.py = p[1];
    return s;
}

} // namespace rvm

#endif
