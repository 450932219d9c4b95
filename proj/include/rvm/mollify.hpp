#ifndef RVM_MOLLIFY_HPP
#define RVM_MOLLIFY_HPP

#include "rvm/kinematics.hpp"
#include "rvm/phase_grid.hpp"
#include "rvm/reduce.hpp"
#include "rvm/solver.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Friedrichs mollifiers on the grid and the coarse-graining operator
// f -> rho_eps *_x rho_delta *_xi f (optionally also *_t rho_eta).

namespace rvm {

enum class Profile { bump, quartic };

inline Profile parse_profile(std::string_view name)
{
    if (name == "bump")
        return Profile::bump;
    if (name == "quartic")
        return Profile::quartic;
    throw std::invalid_argument("unknown kernel profile '" + std::string(name) + "'");
}

/// Unnormalized radial profile on the unit ball, r = |z| / scale.
inline double profile_value(Profile p, double r)
{
    if (r >= 1.0)
        return 0.0;
    const double s = 1.0 - r * r;
    return p == Profile::bump ? std::exp(-1.0 / s) : s * s;
}

/// d/dr of profile_value.
inline double profile_derivative(Profile p, double r)
{
    if (r >= 1.0)
        return 0.0;
    const double s = 1.0 - r * r;
    return p == Profile::bump ? -2.0 * r / (s * s) * std::exp(-1.0 / s) : -4.0 * r * s;
}

/// Discrete radially symmetric kernel: lattice offsets m (in cells) with
/// |m| h < scale, weights proportional to the profile and summing to 1.
struct MollifierKernel {
    std::size_t dim = 1;
    double scale = 0.0;
    double spacing = 0.0;
    Profile profile = Profile::bump;
    std::vector<std::array<long, 2>> offsets;
    std::vector<double> weights;
    /// Sum of the unnormalized profile values (used to scale kernel gradients).
    double raw_mass = 0.0;

    std::size_t size() const { return weights.size(); }
    long radius_cells() const { return static_cast<long>(std::ceil(scale / spacing)); }

    /// max_ij sum_m w_m |z_i| |z_j| / scale^2, the second-moment constant of
    /// the unit kernel.
    double second_moment_constant() const
    {
        double c = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                const double s = pairwise_sum_by(size(), [&](std::size_t k) {
                    return weights[k] * std::abs(static_cast<double>(offsets[k][i]) * spacing) *
                           std::abs(static_cast<double>(offsets[k][j]) * spacing);
                });
                c = std::max(c, s / (scale * scale));
            }
        return c;
    }
};

/// `domain` is the extent of the axis the kernel will act on; scales above half
/// of it are rejected, as are scales below two grid spacings.
inline MollifierKernel make_kernel(std::size_t dim, double scale, double spacing, Profile profile = Profile::bump,
                                   double domain = std::numeric_limits<double>::infinity())
{
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("make_kernel: dimension must be 1 or 2");
    if (!(spacing > 0.0))
        throw std::invalid_argument("make_kernel: spacing must be positive");
    if (!(scale >= 2.0 * spacing))
        throw std::invalid_argument("make_kernel: under-resolved kernel (scale " + std::to_string(scale) +
                                    " < 2 grid spacings of " + std::to_string(spacing) + ")");
    if (scale > 0.5 * domain)
        throw std::invalid_argument("make_kernel: scale " + std::to_string(scale) + " exceeds half the domain");
    MollifierKernel k;
    k.dim = dim;
    k.scale = scale;
    k.spacing = spacing;
    k.profile = profile;
    const long r = k.radius_cells();
    const long r2 = dim == 2 ? r : 0;
    std::vector<double> raw;
    for (long a = -r; a <= r; ++a)
        for (long b = -r2; b <= r2; ++b) {
            const double dist = std::hypot(static_cast<double>(a), static_cast<double>(b)) * spacing / scale;
            const double w = profile_value(profile, dist);
            if (w > 0.0) {
                k.offsets.push_back({a, b});
                raw.push_back(w);
            }
        }
    k.raw_mass = pairwise_sum(raw);
    k.weights.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        k.weights[i] = raw[i] / k.raw_mass;
    return k;
}

inline MollifierKernel make_x_kernel(const PhaseGrid& g, double eps, Profile profile = Profile::bump)
{
    return make_kernel(1, eps, g.dx(), profile, g.lx);
}

inline MollifierKernel make_xi_kernel(const PhaseGrid& g, double delta, Profile profile = Profile::bump)
{
    if (g.xi_dims() == 2 && g.dxi(0) != g.dxi(1))
        throw std::invalid_argument("momentum mollification needs equal spacing on both momentum axes");
    return make_kernel(g.xi_dims(), delta, g.dxi(0), profile, g.xi_extent());
}

/// Periodic convolution of a spatial line.
inline std::vector<double> convolve_periodic(std::span<const double> line, const MollifierKernel& k)
{
    const auto n = static_cast<long>(line.size());
    std::vector<double> out(line.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < k.size(); ++m) {
            const long src = ((i - k.offsets[m][0]) % n + n) % n;
            s += k.weights[m] * line[static_cast<std::size_t>(src)];
        }
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

/// x-convolution of every momentum column (periodic).
inline DistField mollify_x(const DistField& f, const MollifierKernel& k)
{
    const auto& g = f.grid;
    DistField out(g);
    const auto nx = static_cast<long>(g.nx);
    const std::size_t nxi = g.xi_size();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nx; ++i) {
        auto dst = out.slice(static_cast<std::size_t>(i));
        for (std::size_t m = 0; m < k.size(); ++m) {
            const long src = ((i - k.offsets[m][0]) % nx + nx) % nx;
            const auto row = f.slice(static_cast<std::size_t>(src));
            const double w = k.weights[m];
            for (std::size_t j = 0; j < nxi; ++j)
                dst[j] += w * row[j];
        }
    }
    return out;
}

/// Zero-extended convolution of one momentum slice.
inline void convolve_xi_slice(std::span<const double> src, std::span<double> dst, const PhaseGrid& g,
                              const MollifierKernel& k)
{
    const auto n1 = static_cast<long>(g.n1());
    const auto n2 = static_cast<long>(g.n2());
    for (long a = 0; a < n1; ++a)
        for (long b = 0; b < n2; ++b) {
            double s = 0.0;
            for (std::size_t m = 0; m < k.size(); ++m) {
                const long sa = a - k.offsets[m][0];
                const long sb = b - k.offsets[m][1];
                if (sa < 0 || sa >= n1 || sb < 0 || sb >= n2)
                    continue;
                s += k.weights[m] * src[static_cast<std::size_t>(sa * n2 + sb)];
            }
            dst[static_cast<std::size_t>(a * n2 + b)] = s;
        }
}

inline DistField mollify_xi(const DistField& f, const MollifierKernel& k)
{
    const auto& g = f.grid;
    DistField out(g);
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        convolve_xi_slice(f.slice(ix), out.slice(ix), g, k);
    return out;
}

enum class Axes { x, xi, both };

/// f^{eps,delta}; `eps` is ignored for Axes::xi and `delta` for Axes::x.
inline DistField mollify(const DistField& f, Axes axes, double eps, double delta, Profile profile = Profile::bump)
{
    switch (axes) {
    case Axes::x:
        return mollify_x(f, make_x_kernel(f.grid, eps, profile));
    case Axes::xi:
        return mollify_xi(f, make_xi_kernel(f.grid, delta, profile));
    case Axes::both:
    default: {
        const auto kx = make_x_kernel(f.grid, eps, profile);
        const auto kxi = make_xi_kernel(f.grid, delta, profile);
        return mollify_xi(mollify_x(f, kx), kxi);
    }
    }
}

/// Spatial mollification of the three field components.
inline EMField mollify_em(const EMField& em, const MollifierKernel& k)
{
    EMField out;
    out.ex = convolve_periodic(em.ex, k);
    out.ey = convolve_periodic(em.ey, k);
    out.bz = convolve_periodic(em.bz, k);
    return out;
}

/// v^delta on the momentum nodes, using the analytic velocity at every stencil
/// point (including points beyond the momentum cutoff).
struct MollifiedVelocity {
    std::vector<double> vx;
    std::vector<double> vy;
};

inline MollifiedVelocity velocity_mollified(const PhaseGrid& g, const MollifierKernel& k)
{
    MollifiedVelocity out{std::vector<double>(g.xi_size()), std::vector<double>(g.xi_size())};
    const double h = g.dxi(0);
    for (std::size_t j = 0; j < g.xi_size(); ++j) {
        const auto xi = g.momentum(j);
        const bool two_d = g.xi_dims() == 2;
        double sx = 0.0, sy = 0.0;
        for (std::size_t m = 0; m < k.size(); ++m) {
            const Momentum<2> p{xi[0] - static_cast<double>(k.offsets[m][0]) * h,
                                two_d ? xi[1] - static_cast<double>(k.offsets[m][1]) * h : 0.0};
            const auto v = velocity(p);
            sx += k.weights[m] * v[0];
            sy += k.weights[m] * v[1];
        }
        out.vx[j] = sx;
        out.vy[j] = sy;
    }
    return out;
}

struct VelocityGap {
    double gap = 0.0;     ///< max_xi |v - v^delta|
    double c_rho = 0.0;   ///< second-moment constant of the kernel
    double bound = 0.0;   ///< 6 c_rho delta^2
};

inline VelocityGap velocity_mollification_gap(double delta, const PhaseGrid& g, Profile profile = Profile::bump)
{
    const auto k = make_xi_kernel(g, delta, profile);
    const auto vd = velocity_mollified(g, k);
    const KinematicTable kin(g);
    VelocityGap r;
    for (std::size_t j = 0; j < g.xi_size(); ++j)
        r.gap = std::max(r.gap, std::hypot(kin.vx[j] - vd.vx[j], kin.vy[j] - vd.vy[j]));
    r.c_rho = k.second_moment_constant();
    r.bound = 6.0 * r.c_rho * delta * delta;
    return r;
}

/// Time mollification of an equally spaced snapshot sequence. Only snapshots
/// whose full stencil lies inside the run are returned.
inline Trajectory mollify_time(const Trajectory& traj, double eta, Profile profile = Profile::bump)
{
    const auto& s = traj.snapshots;
    if (s.size() < 3)
        throw std::invalid_argument("mollify_time: at least three snapshots required");
    const double stride = s[1].t - s[0].t;
    if (!(stride > 0.0))
        throw std::invalid_argument("mollify_time: snapshot times must increase");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs((s[i].t - s[i - 1].t) - stride) > 1e-9 * stride)
            throw std::invalid_argument("mollify_time: snapshots must be equally spaced");
    if (!(eta >= 2.0 * stride))
        throw std::invalid_argument("mollify_time: eta below two snapshot strides");
    const auto k = make_kernel(1, eta, stride, profile);
    const long r = k.radius_cells();
    const auto n = static_cast<long>(s.size());
    if (n <= 2 * r)
        throw std::invalid_argument("mollify_time: too few snapshots for eta");
    Trajectory out;
    for (long c = r; c < n - r; ++c) {
        const auto& centre = s[static_cast<std::size_t>(c)];
        DistField f(centre.grid());
        EMField em(centre.grid().nx);
        for (std::size_t m = 0; m < k.size(); ++m) {
            const auto& src = s[static_cast<std::size_t>(c - k.offsets[m][0])];
            const double w = k.weights[m];
            for (std::size_t i = 0; i < f.values.size(); ++i)
                f.values[i] += w * src.f.values[i];
            for (std::size_t i = 0; i < em.ex.size(); ++i) {
                em.ex[i] += w * src.em.ex[i];
                em.ey[i] += w * src.em.ey[i];
                em.bz[i] += w * src.em.bz[i];
            }
        }
        out.snapshots.emplace_back(centre.t, std::move(f), std::move(em));
    }
    return out;
}

} // namespace rvm

#endif
