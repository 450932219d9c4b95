#ifndef RVM_REGULARITY_HPP
#define RVM_REGULARITY_HPP

#include "rvm/fit.hpp"
#include "rvm/phase_grid.hpp"
#include "rvm/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Structure-function estimates of fractional regularity:
//   S_p(h) = mean over axis-aligned unit vectors e of || f(. - h e) - f ||_{L^p}
// with periodic shifts in x and zero extension in momentum.

namespace rvm {

enum class AxisSet { x, xi, all };

struct StructureFunction {
    double p = 2.0;
    std::vector<double> shifts; ///< physical shift lengths (whole cells)
    std::vector<double> values;
    /// Smallest grid spacing among the shifted axes and the shortest extent;
    /// they define the default fit window [4 spacing, extent / 8].
    double spacing = 0.0;
    double extent = 0.0;
};

namespace detail {

inline long shift_cells(double h, double spacing)
{
    const long cells = std::lround(h / spacing);
    if (h > 0.0 && cells < 1)
        throw std::invalid_argument("structure_function: shift " + std::to_string(h) + " below one grid cell");
    if (h < 0.0)
        throw std::invalid_argument("structure_function: negative shift");
    return cells;
}

/// || line(. - s) - line ||_p on a periodic line, s in cells.
inline double periodic_increment(std::span<const double> line, long s, double cell, double p)
{
    const auto n = static_cast<long>(line.size());
    std::vector<double> d(line.size());
    for (long i = 0; i < n; ++i)
        d[static_cast<std::size_t>(i)] = line[static_cast<std::size_t>(((i - s) % n + n) % n)] - line[static_cast<std::size_t>(i)];
    return lp_norm(d, cell, p);
}

/// Increment of a phase-space field along one axis (0 = x, 1 = xi_1, 2 = xi_2).
inline double field_increment(const DistField& f, std::size_t axis, long s, double p)
{
    const auto& g = f.grid;
    const auto nx = static_cast<long>(g.nx);
    const auto n1 = static_cast<long>(g.n1());
    const auto n2 = static_cast<long>(g.n2());
    std::vector<double> d(f.values.size());
    for (long ix = 0; ix < nx; ++ix)
        for (long a = 0; a < n1; ++a)
            for (long b = 0; b < n2; ++b) {
                long sx = ix, sa = a, sb = b;
                if (axis == 0)
                    sx = ((ix - s) % nx + nx) % nx;
                else if (axis == 1)
                    sa = a - s;
                else
                    sb = b - s;
                double src = 0.0;
                if (sa >= 0 && sa < n1 && sb >= 0 && sb < n2)
                    src = f.values[g.index(static_cast<std::size_t>(sx), static_cast<std::size_t>(sa * n2 + sb))];
                const std::size_t here = g.index(static_cast<std::size_t>(ix), static_cast<std::size_t>(a * n2 + b));
                d[here] = src - f.values[here];
            }
    return lp_norm(d, g.cell_volume(), p);
}

} // namespace detail

/// Periodic line of physical length `length`.
inline StructureFunction structure_function(std::span<const double> line, double length, double p,
                                            std::span<const double> shifts)
{
    if (line.empty())
        throw std::invalid_argument("structure_function: empty field");
    StructureFunction sf;
    sf.p = p;
    sf.spacing = length / static_cast<double>(line.size());
    sf.extent = length;
    std::vector<long> cells(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i)
        cells[i] = detail::shift_cells(shifts[i], sf.spacing); // throws outside the parallel region
    sf.shifts.resize(shifts.size());
    sf.values.resize(shifts.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const long s = cells[i];
        sf.shifts[i] = static_cast<double>(s) * sf.spacing;
        sf.values[i] = s == 0 ? 0.0 : detail::periodic_increment(line, s, sf.spacing, p);
    }
    return sf;
}

inline StructureFunction structure_function(const DistField& f, double p, AxisSet axes,
                                            std::span<const double> shifts)
{
    const auto& g = f.grid;
    std::vector<std::size_t> list;
    if (axes != AxisSet::xi)
        list.push_back(0);
    if (axes != AxisSet::x)
        for (std::size_t a = 0; a < g.xi_dims(); ++a)
            list.push_back(a + 1);
    auto spacing_of = [&](std::size_t axis) { return axis == 0 ? g.dx() : g.dxi(axis - 1); };
    auto extent_of = [&](std::size_t axis) { return axis == 0 ? g.lx : g.xi_extent(); };
    StructureFunction sf;
    sf.p = p;
    sf.spacing = std::numeric_limits<double>::infinity();
    sf.extent = std::numeric_limits<double>::infinity();
    for (auto a : list) {
        sf.spacing = std::min(sf.spacing, spacing_of(a));
        sf.extent = std::min(sf.extent, extent_of(a));
    }
    sf.shifts.resize(shifts.size());
    sf.values.resize(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        double acc = 0.0;
        for (auto a : list) {
            const long s = detail::shift_cells(shifts[i], spacing_of(a));
            acc += s == 0 ? 0.0 : detail::field_increment(f, a, s, p);
        }
        sf.shifts[i] = static_cast<double>(detail::shift_cells(shifts[i], sf.spacing)) * sf.spacing;
        sf.values[i] = acc / static_cast<double>(list.size());
    }
    return sf;
}

/// Roughly log-spaced whole-cell shifts between h_min and h_max (deduplicated).
inline std::vector<double> log_shifts(double spacing, double h_min, double h_max, std::size_t count)
{
    if (!(h_min >= spacing) || !(h_max >= h_min) || count < 1)
        throw std::invalid_argument("log_shifts: invalid range");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const double h = h_min * std::pow(h_max / h_min, frac);
        const double snapped = static_cast<double>(std::max(1L, std::lround(h / spacing))) * spacing;
        if (out.empty() || snapped > out.back())
            out.push_back(snapped);
    }
    return out;
}

struct ExponentFit {
    double alpha_hat = std::numeric_limits<double>::quiet_NaN();
    double raw_slope = std::numeric_limits<double>::quiet_NaN();
    double ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
    double h_min = 0.0;
    double h_max = 0.0;
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 0;
    /// Slope at or above the Lipschitz cap (>= 0.95); alpha_hat is clipped at 1.
    bool saturated = false;
    /// Fewer than 4 points or less than a decade in the window.
    bool flagged = true;
};

inline constexpr double saturation_threshold = 0.95;

/// Fit window [4 spacing, extent / 8].
inline std::pair<double, double> default_window(const StructureFunction& sf)
{
    return {4.0 * sf.spacing, sf.extent / 8.0};
}

inline ExponentFit exponent_fit(const StructureFunction& sf, double h_min, double h_max)
{
    std::vector<double> xs, ys;
    const double tol = 1e-9 * sf.spacing;
    for (std::size_t i = 0; i < sf.shifts.size(); ++i)
        if (sf.shifts[i] >= h_min - tol && sf.shifts[i] <= h_max + tol && sf.shifts[i] > 0.0) {
            xs.push_back(sf.shifts[i]);
            ys.push_back(sf.values[i]);
        }
    if (xs.size() < 2)
        throw std::invalid_argument("exponent_fit: fewer than two shifts inside the fit window");
    const auto fit = fit_loglog(xs, ys);
    ExponentFit out;
    out.points = xs.size();
    out.h_min = *std::min_element(xs.begin(), xs.end());
    out.h_max = *std::max_element(xs.begin(), xs.end());
    out.raw_slope = fit.slope;
    out.ci_halfwidth = fit.ci_halfwidth;
    out.r_squared = fit.r_squared;
    out.flagged = fit.flagged;
    out.saturated = fit.slope >= saturation_threshold;
    out.alpha_hat = std::min(fit.slope, 1.0);
    return out;
}

inline ExponentFit exponent_fit(const StructureFunction& sf)
{
    const auto [lo, hi] = default_window(sf);
    return exponent_fit(sf, lo, hi);
}

/// sup_{h <= h_max} S_p(h) / h^alpha over every whole-cell shift of a periodic line.
inline double besov_modulus(std::span<const double> line, double length, double alpha, double p, double h_max)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("besov_modulus: alpha must lie in (0, 1)");
    const double dx = length / static_cast<double>(line.size());
    const long cells = std::lround(std::floor(h_max / dx + 1e-9));
    if (cells < 1)
        throw std::invalid_argument("besov_modulus: h_max below one grid cell");
    double best = 0.0;
    for (long s = 1; s <= cells; ++s) {
        const double h = static_cast<double>(s) * dx;
        best = std::max(best, detail::periodic_increment(line, s, dx, p) / std::pow(h, alpha));
    }
    return best;
}

inline double besov_modulus(const DistField& f, double alpha, double p, double h_max, AxisSet axes = AxisSet::all)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("besov_modulus: alpha must lie in (0, 1)");
    const auto& g = f.grid;
    double spacing = axes == AxisSet::xi ? g.dxi(0) : g.dx();
    if (axes != AxisSet::x)
        for (std::size_t a = 0; a < g.xi_dims(); ++a)
            spacing = std::min(spacing, g.dxi(a));
    const long cells = std::lround(std::floor(h_max / spacing + 1e-9));
    if (cells < 1)
        throw std::invalid_argument("besov_modulus: h_max below one grid cell");
    std::vector<double> shifts;
    for (long s = 1; s <= cells; ++s)
        shifts.push_back(static_cast<double>(s) * spacing);
    const auto sf = structure_function(f, p, axes, shifts);
    double best = 0.0;
    for (std::size_t i = 0; i < sf.shifts.size(); ++i)
        best = std::max(best, sf.values[i] / std::pow(sf.shifts[i], alpha));
    return best;
}

/// Gagliardo seminorm on a periodic line (minimum-image distance), O(N^2):
///   ( sum_{i != j} |f_i - f_j|^p / d_ij^{1 + alpha p} dx^2 )^{1/p}
/// Intended for cross-checking the structure-function route on small grids.
inline double gagliardo_seminorm(std::span<const double> line, double length, double alpha, double p)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(p >= 1.0))
        throw std::invalid_argument("gagliardo_seminorm: need 0 < alpha < 1 and p >= 1");
    const std::size_t n = line.size();
    const double dx = length / static_cast<double>(n);
    std::vector<double> rows(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = pairwise_sum_by(n, [&](std::size_t j) {
            if (j == i)
                return 0.0;
            const std::size_t k = i > j ? i - j : j - i;
            const double d = static_cast<double>(std::min(k, n - k)) * dx;
            return std::pow(std::abs(line[i] - line[j]), p) / std::pow(d, 1.0 + alpha * p);
        });
    }
    return std::pow(pairwise_sum(rows) * dx * dx, 1.0 / p);
}

} // namespace rvm

#endif
