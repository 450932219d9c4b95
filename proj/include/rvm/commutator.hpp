#ifndef RVM_COMMUTATOR_HPP
#define RVM_COMMUTATOR_HPP

#include "rvm/fft.hpp"
#include "rvm/fit.hpp"
#include "rvm/kinematics.hpp"
#include "rvm/mollify.hpp"
#include "rvm/phase_grid.hpp"
#include "rvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Commutators between coarse-graining and the transport terms, at eta = 0.
//
// With F = f^eps and v^delta the momentum-mollified velocity,
//   (v f)^{eps,delta} - v^delta f^{eps,delta}
//     = r_delta(v, F) + (F^delta - F)(v - v^delta)
// where r is the kernel average of the product of increments. The Lorentz
// commutator (F_L f)^{eps,delta} - F_L^{eps,delta} f^{eps,delta} splits as
//   T_E  = (E G)^eps - E^eps G^eps,                G = f^delta
//   T_B1 = (v x (B f)^eps)^delta - v x (B f)^{eps,delta}
//   T_B2 = v x [(B G)^eps - B^eps G^eps]
//   T_B3 = (v - v^delta) x B^eps f^{eps,delta}
// and the reported quantities are divergences of these fields.

namespace rvm {

struct NormConfig {
    /// Exponent of the phase-space norm (free streaming) and of the outer
    /// momentum norm (Lorentz).
    double p = 2.0;
    /// Inner spatial exponent of the mixed norm.
    double r = 2.0;
    Profile profile = Profile::bump;
};

/// Kernel acting as the identity (scale 0 on that axis).
inline MollifierKernel identity_kernel(std::size_t dim)
{
    MollifierKernel k;
    k.dim = dim;
    k.offsets = {{0, 0}};
    k.weights = {1.0};
    k.raw_mass = 1.0;
    return k;
}

namespace detail {

inline MollifierKernel x_kernel_or_identity(const PhaseGrid& g, double eps, Profile p)
{
    return eps > 0.0 ? make_x_kernel(g, eps, p) : identity_kernel(1);
}

inline MollifierKernel xi_kernel_or_identity(const PhaseGrid& g, double delta, Profile p)
{
    return delta > 0.0 ? make_xi_kernel(g, delta, p) : identity_kernel(g.xi_dims());
}

/// Spatial field broadcast over momentum.
inline DistField broadcast_x(const PhaseGrid& g, std::span<const double> line)
{
    DistField out(g);
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        std::fill(out.slice(ix).begin(), out.slice(ix).end(), line[ix]);
    return out;
}

inline DistField times_x(const DistField& f, std::span<const double> line)
{
    DistField out = f;
    for (std::size_t ix = 0; ix < f.grid.nx; ++ix)
        for (double& v : out.slice(ix))
            v *= line[ix];
    return out;
}

inline DistField times_xi(const DistField& f, std::span<const double> w)
{
    DistField out = f;
    for (std::size_t ix = 0; ix < f.grid.nx; ++ix) {
        auto s = out.slice(ix);
        for (std::size_t j = 0; j < s.size(); ++j)
            s[j] *= w[j];
    }
    return out;
}

inline void axpy(DistField& y, double a, const DistField& x)
{
    for (std::size_t i = 0; i < y.values.size(); ++i)
        y.values[i] += a * x.values[i];
}

inline DistField difference(const DistField& a, const DistField& b)
{
    DistField out = a;
    axpy(out, -1.0, b);
    return out;
}

} // namespace detail

/// Kernel-weighted average of the product of increments
///   r(x, xi) = sum_{y,w} rho_eps(y) rho_delta(w) (f(x-y, xi-w) - f(x, xi)) (g(x-y, xi-w) - g(x, xi)),
/// x periodic, xi zero-extended. eps = 0 or delta = 0 switches the axis off.
inline DistField remainder_r(const DistField& f, const DistField& g, double eps, double delta,
                             Profile profile = Profile::bump)
{
    if (!(f.grid == g.grid))
        throw std::invalid_argument("remainder_r: grid mismatch");
    const auto& G = f.grid;
    const auto kx = detail::x_kernel_or_identity(G, eps, profile);
    const auto kxi = detail::xi_kernel_or_identity(G, delta, profile);
    const auto nx = static_cast<long>(G.nx);
    const auto n1 = static_cast<long>(G.n1());
    const auto n2 = static_cast<long>(G.n2());
    DistField out(G);
#pragma omp parallel for schedule(static)
    for (long ix = 0; ix < nx; ++ix)
        for (long a = 0; a < n1; ++a)
            for (long b = 0; b < n2; ++b) {
                const std::size_t here = G.index(static_cast<std::size_t>(ix), static_cast<std::size_t>(a * n2 + b));
                const double f0 = f.values[here];
                const double g0 = g.values[here];
                double s = 0.0;
                for (std::size_t my = 0; my < kx.size(); ++my) {
                    const long sx = ((ix - kx.offsets[my][0]) % nx + nx) % nx;
                    double inner = 0.0;
                    for (std::size_t mw = 0; mw < kxi.size(); ++mw) {
                        const long sa = a - kxi.offsets[mw][0];
                        const long sb = b - kxi.offsets[mw][1];
                        double fv = 0.0, gv = 0.0;
                        if (sa >= 0 && sa < n1 && sb >= 0 && sb < n2) {
                            const std::size_t src =
                                G.index(static_cast<std::size_t>(sx), static_cast<std::size_t>(sa * n2 + sb));
                            fv = f.values[src];
                            gv = g.values[src];
                        }
                        inner += kxi.weights[mw] * (fv - f0) * (gv - g0);
                    }
                    s += kx.weights[my] * inner;
                }
                out.values[here] = s;
            }
    return out;
}

/// remainder_r with a spatial second factor g(x) broadcast over momentum.
inline DistField remainder_r(const DistField& f, std::span<const double> g, double eps, double delta,
                             Profile profile = Profile::bump)
{
    if (g.size() != f.grid.nx)
        throw std::invalid_argument("remainder_r: spatial factor length mismatch");
    // Zero extension in xi applies to f only; a spatial factor has no xi edge,
    // so only the x increments of g enter and the xi sum factorizes.
    const auto& G = f.grid;
    const auto kx = detail::x_kernel_or_identity(G, eps, profile);
    const auto kxi = detail::xi_kernel_or_identity(G, delta, profile);
    const auto nx = static_cast<long>(G.nx);
    const DistField fd = mollify_xi(f, kxi);
    DistField out(G);
    const std::size_t nxi = G.xi_size();
#pragma omp parallel for schedule(static)
    for (long ix = 0; ix < nx; ++ix) {
        auto dst = out.slice(static_cast<std::size_t>(ix));
        const auto f0 = f.slice(static_cast<std::size_t>(ix));
        const double g0 = g[static_cast<std::size_t>(ix)];
        for (std::size_t my = 0; my < kx.size(); ++my) {
            const long sx = ((ix - kx.offsets[my][0]) % nx + nx) % nx;
            const auto row = fd.slice(static_cast<std::size_t>(sx));
            const double w = kx.weights[my] * (g[static_cast<std::size_t>(sx)] - g0);
            for (std::size_t j = 0; j < nxi; ++j)
                dst[j] += w * (row[j] - f0[j]);
        }
    }
    return out;
}

/// r_delta(v_c, F): momentum-only remainder against the analytic velocity
/// component c (evaluated beyond the momentum cutoff where needed).
inline DistField remainder_velocity(const DistField& F, std::size_t component, const MollifierKernel& kxi)
{
    const auto& G = F.grid;
    const auto n1 = static_cast<long>(G.n1());
    const auto n2 = static_cast<long>(G.n2());
    const std::size_t nxi = G.xi_size();
    const double h = G.dxi(0);
    const bool two_d = G.xi_dims() == 2;
    std::vector<double> dv(nxi * kxi.size());
    for (std::size_t j = 0; j < nxi; ++j) {
        const auto xi = G.momentum(j);
        const double v0 = velocity(xi)[component];
        for (std::size_t m = 0; m < kxi.size(); ++m) {
            const Momentum<2> p{xi[0] - static_cast<double>(kxi.offsets[m][0]) * h,
                                two_d ? xi[1] - static_cast<double>(kxi.offsets[m][1]) * h : 0.0};
            dv[j * kxi.size() + m] = velocity(p)[component] - v0;
        }
    }
    DistField out(G);
#pragma omp parallel for schedule(static)
    for (std::size_t ix = 0; ix < G.nx; ++ix) {
        const auto src = F.slice(ix);
        auto dst = out.slice(ix);
        for (long a = 0; a < n1; ++a)
            for (long b = 0; b < n2; ++b) {
                const auto j = static_cast<std::size_t>(a * n2 + b);
                double s = 0.0;
                for (std::size_t m = 0; m < kxi.size(); ++m) {
                    const long sa = a - kxi.offsets[m][0];
                    const long sb = b - kxi.offsets[m][1];
                    const double fv = (sa >= 0 && sa < n1 && sb >= 0 && sb < n2)
                                          ? src[static_cast<std::size_t>(sa * n2 + sb)]
                                          : 0.0;
                    s += kxi.weights[m] * dv[j * kxi.size() + m] * (fv - src[j]);
                }
                dst[j] = s;
            }
    }
    return out;
}

/// Periodic spectral d/dx of every momentum column.
inline DistField divergence_x(const DistField& f)
{
    const auto& G = f.grid;
    DistField out(G);
    const std::size_t nxi = G.xi_size();
#pragma omp parallel
    {
        LineFft fft(G.nx);
#pragma omp for schedule(static)
        for (std::size_t j = 0; j < nxi; ++j) {
            auto line = fft.real();
            for (std::size_t ix = 0; ix < G.nx; ++ix)
                line[ix] = f.values[ix * nxi + j];
            spectral_derivative(fft, G.lx);
            for (std::size_t ix = 0; ix < G.nx; ++ix)
                out.values[ix * nxi + j] = line[ix];
        }
    }
    return out;
}

/// d/dxi_axis by centered differences, one-sided at the momentum edges.
inline DistField derivative_xi(const DistField& f, std::size_t axis)
{
    const auto& G = f.grid;
    DistField out(G);
    const std::size_t n1 = G.n1(), n2 = G.n2();
    const std::size_t len = axis == 0 ? n1 : n2;
    const std::size_t stride = axis == 0 ? n2 : 1;
    const std::size_t lines = axis == 0 ? n2 : n1;
    const double h = G.dxi(axis);
    if (len < 2)
        return out;
    for (std::size_t ix = 0; ix < G.nx; ++ix) {
        const auto s = f.slice(ix);
        auto d = out.slice(ix);
        for (std::size_t l = 0; l < lines; ++l) {
            const std::size_t base = axis == 0 ? l : l * n2;
            auto at = [&](std::size_t i) { return s[base + i * stride]; };
            d[base] = (at(1) - at(0)) / h;
            for (std::size_t i = 1; i + 1 < len; ++i)
                d[base + i * stride] = (at(i + 1) - at(i - 1)) / (2.0 * h);
            d[base + (len - 1) * stride] = (at(len - 1) - at(len - 2)) / h;
        }
    }
    return out;
}

/// Momentum divergence of a vector field given by its components.
inline DistField divergence_xi(const DistField& v1, const DistField* v2)
{
    DistField out = derivative_xi(v1, 0);
    if (v2 != nullptr && v1.grid.xi_dims() == 2)
        detail::axpy(out, 1.0, derivative_xi(*v2, 1));
    return out;
}

inline double phase_space_norm(const DistField& f, double p) { return lp_norm(f, p); }

struct FsCommutator {
    DistField field; ///< d_x((v f)^{eps,delta} - v^delta f^{eps,delta})
    double norm = 0.0;
};

enum class FsRoute { identity, direct };

inline FsCommutator fs_commutator(const DistField& f, double eps, double delta, const NormConfig& cfg = {},
                                  FsRoute route = FsRoute::identity)
{
    const auto& G = f.grid;
    const auto kx = make_x_kernel(G, eps, cfg.profile);
    const auto kxi = make_xi_kernel(G, delta, cfg.profile);
    const KinematicTable kin(G);
    const auto vd = velocity_mollified(G, kxi);
    const DistField F = mollify_x(f, kx);
    const DistField Fd = mollify_xi(F, kxi);
    DistField c;
    if (route == FsRoute::direct) {
        c = mollify_xi(detail::times_xi(F, kin.vx), kxi);
        detail::axpy(c, -1.0, detail::times_xi(Fd, vd.vx));
    } else {
        c = remainder_velocity(F, 0, kxi);
        std::vector<double> gap(G.xi_size());
        for (std::size_t j = 0; j < gap.size(); ++j)
            gap[j] = kin.vx[j] - vd.vx[j];
        detail::axpy(c, 1.0, detail::times_xi(detail::difference(Fd, F), gap));
    }
    FsCommutator out;
    out.field = divergence_x(c);
    out.norm = phase_space_norm(out.field, cfg.p);
    return out;
}

/// Norms of one (eps, delta) evaluation, or their L^1-in-time assembly.
struct CommutatorReport {
    double eps = 0.0;
    double delta = 0.0;
    double fs_norm = 0.0;
    double te_norm = 0.0;
    double tb1_norm = 0.0;
    double tb2_norm = 0.0;
    double tb3_norm = 0.0;
    double lorentz_norm = 0.0;
};

struct LorentzCommutator {
    /// Momentum divergences of the total commutator and of each part.
    DistField total, te, tb1, tb2, tb3;
    CommutatorReport norms;
    /// max |total - (te + tb1 + tb2 + tb3)|
    double decomposition_residual = 0.0;
};

inline double mixed(const DistField& f, const NormConfig& cfg) { return mixed_norm(f, cfg.p, cfg.r); }

inline LorentzCommutator lorentz_commutator(const DistField& f, const EMField& em, double eps, double delta,
                                            const NormConfig& cfg = {})
{
    using detail::axpy;
    using detail::times_x;
    using detail::times_xi;
    const auto& G = f.grid;
    const bool two_d = G.xi_dims() == 2;
    const auto kx = make_x_kernel(G, eps, cfg.profile);
    const auto kxi = make_xi_kernel(G, delta, cfg.profile);
    const KinematicTable kin(G);
    const auto vd = velocity_mollified(G, kxi);
    const EMField em_e = mollify_em(em, kx);

    const DistField Gd = mollify_xi(f, kxi);  // f^delta
    const DistField fed = mollify_x(Gd, kx);  // f^{eps,delta}

    // T_E components: (E G)^eps - E^eps G^eps.
    DistField te1 = mollify_x(times_x(Gd, em.ex), kx);
    axpy(te1, -1.0, times_x(fed, em_e.ex));
    DistField te2(G);
    if (two_d) {
        te2 = mollify_x(times_x(Gd, em.ey), kx);
        axpy(te2, -1.0, times_x(fed, em_e.ey));
    }

    LorentzCommutator out;
    out.te = divergence_xi(te1, &te2);

    // Electric part of the total, by the independent route ((E f)^eps)^delta.
    DistField tot1 = mollify_xi(mollify_x(times_x(f, em.ex), kx), kxi);
    axpy(tot1, -1.0, times_x(fed, em_e.ex));
    DistField tot2(G);

    DistField tb1_1(G), tb1_2(G), tb2_1(G), tb2_2(G), tb3_1(G), tb3_2(G);
    if (two_d) {
        tot2 = mollify_xi(mollify_x(times_x(f, em.ey), kx), kxi);
        axpy(tot2, -1.0, times_x(fed, em_e.ey));

        // v x (Bz e_z) = Bz (v_y, -v_x)
        const DistField Q = mollify_x(times_x(f, em.bz), kx);   // (B f)^eps
        const DistField Qd = mollify_xi(Q, kxi);                // (B f)^{eps,delta}
        const DistField vyQd = mollify_xi(times_xi(Q, kin.vy), kxi);
        const DistField vxQd = mollify_xi(times_xi(Q, kin.vx), kxi);
        tb1_1 = vyQd;
        axpy(tb1_1, -1.0, times_xi(Qd, kin.vy));
        tb1_2 = times_xi(Qd, kin.vx);
        axpy(tb1_2, -1.0, vxQd);

        DistField P = mollify_x(times_x(Gd, em.bz), kx);        // (B G)^eps
        axpy(P, -1.0, times_x(fed, em_e.bz));
        tb2_1 = times_xi(P, kin.vy);
        tb2_2 = times_xi(P, kin.vx);
        for (double& v : tb2_2.values)
            v = -v;

        std::vector<double> gx(G.xi_size()), gy(G.xi_size());
        for (std::size_t j = 0; j < gx.size(); ++j) {
            gx[j] = kin.vx[j] - vd.vx[j];
            gy[j] = kin.vy[j] - vd.vy[j];
        }
        const DistField Bf = times_x(fed, em_e.bz);
        tb3_1 = times_xi(Bf, gy);
        tb3_2 = times_xi(Bf, gx);
        for (double& v : tb3_2.values)
            v = -v;

        // Magnetic part of the total: (v x (B f)^eps)^delta - v^delta x B^eps f^{eps,delta}.
        axpy(tot1, 1.0, vyQd);
        axpy(tot1, -1.0, times_xi(Bf, vd.vy));
        axpy(tot2, -1.0, vxQd);
        axpy(tot2, 1.0, times_xi(Bf, vd.vx));
    }
    out.tb1 = divergence_xi(tb1_1, &tb1_2);
    out.tb2 = divergence_xi(tb2_1, &tb2_2);
    out.tb3 = divergence_xi(tb3_1, &tb3_2);
    out.total = divergence_xi(tot1, &tot2);

    for (std::size_t i = 0; i < out.total.values.size(); ++i) {
        const double parts = out.te.values[i] + out.tb1.values[i] + out.tb2.values[i] + out.tb3.values[i];
        out.decomposition_residual = std::max(out.decomposition_residual, std::abs(out.total.values[i] - parts));
    }
    auto& n = out.norms;
    n.eps = eps;
    n.delta = delta;
    n.te_norm = mixed(out.te, cfg);
    n.tb1_norm = mixed(out.tb1, cfg);
    n.tb2_norm = mixed(out.tb2, cfg);
    n.tb3_norm = mixed(out.tb3, cfg);
    n.lorentz_norm = mixed(out.total, cfg);
    return out;
}

/// The piece of div T_B1 that vanishes identically in the continuum:
///   sum_{y,w} rho_eps(y) grad rho_delta(w) . ([v(xi-w) - v(xi)] x B(x-y)) f(x-y, xi)
/// evaluated with the analytic kernel gradient on the momentum lattice.
inline DistField tb11(const DistField& f, const EMField& em, double eps, double delta,
                      Profile profile = Profile::bump)
{
    const auto& G = f.grid;
    if (G.xi_dims() != 2)
        throw std::invalid_argument("tb11: two momentum dimensions required");
    const auto kx = make_x_kernel(G, eps, profile);
    const auto kxi = make_xi_kernel(G, delta, profile);
    const double h = G.dxi(0);
    std::vector<double> k(G.xi_size());
    for (std::size_t j = 0; j < G.xi_size(); ++j) {
        const auto xi = G.momentum(j);
        const auto v0 = velocity(xi);
        double s = 0.0;
        for (std::size_t m = 0; m < kxi.size(); ++m) {
            const double w1 = static_cast<double>(kxi.offsets[m][0]) * h;
            const double w2 = static_cast<double>(kxi.offsets[m][1]) * h;
            const double dist = std::hypot(w1, w2);
            if (dist == 0.0)
                continue;
            const double scale = profile_derivative(profile, dist / delta) / (delta * dist * kxi.raw_mass);
            const double g1 = scale * w1, g2 = scale * w2;
            const auto v = velocity(Momentum<2>{xi[0] - w1, xi[1] - w2});
            const double a1 = v[0] - v0[0], a2 = v[1] - v0[1];
            s += g1 * a2 - g2 * a1; // grad rho . (a x e_z)
        }
        k[j] = s;
    }
    const DistField Q = mollify_x(detail::times_x(f, em.bz), kx);
    return detail::times_xi(Q, k);
}

/// Full evaluation at one snapshot.
inline CommutatorReport commutator_report(const RVMState& s, double eps, double delta, const NormConfig& cfg = {})
{
    auto r = lorentz_commutator(s.f, s.em, eps, delta, cfg).norms;
    r.fs_norm = fs_commutator(s.f, eps, delta, cfg).norm;
    return r;
}

/// L^1-in-time norms over a snapshot sequence (trapezoid rule; a single
/// snapshot yields the instantaneous norms).
inline CommutatorReport commutator_report(const Trajectory& traj, double eps, double delta,
                                          const NormConfig& cfg = {})
{
    const auto& s = traj.snapshots;
    if (s.empty())
        throw std::invalid_argument("commutator_report: empty trajectory");
    std::vector<CommutatorReport> per;
    per.reserve(s.size());
    for (const auto& snap : s)
        per.push_back(commutator_report(snap, eps, delta, cfg));
    if (s.size() == 1)
        return per.front();
    CommutatorReport out;
    out.eps = eps;
    out.delta = delta;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double w = 0.5 * (s[i].t - s[i - 1].t);
        auto acc = [&](double CommutatorReport::*m) { out.*m += w * (per[i - 1].*m + per[i].*m); };
        acc(&CommutatorReport::fs_norm);
        acc(&CommutatorReport::te_norm);
        acc(&CommutatorReport::tb1_norm);
        acc(&CommutatorReport::tb2_norm);
        acc(&CommutatorReport::tb3_norm);
        acc(&CommutatorReport::lorentz_norm);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Balanced path
// ---------------------------------------------------------------------------

/// delta(eps) solving eps^{alpha-1} delta^2 - delta - eps^{alpha+beta} = 0.
struct BalancedPath {
    double alpha = 0.0;
    double beta = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    /// eps^{alpha-1} delta^{alpha+1}
    double eta_residual = 0.0;
    /// 1 when 2 alpha + beta - 1 < 0 (delta ~ eps^{(beta+1)/2}), else 2 (delta ~ eps^{1-alpha}).
    int regime = 1;
    /// |eps^{alpha-1} delta^2 - delta - eps^{alpha+beta}| / max(|terms|)
    double root_residual = 0.0;
};

inline BalancedPath balanced_path(double alpha, double beta, double eps)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("balanced_path: exponents must lie in (0, 1)");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument("balanced_path: eps must be positive");
    BalancedPath b;
    b.alpha = alpha;
    b.beta = beta;
    b.eps = eps;
    const double a = std::pow(eps, alpha - 1.0);
    const double q = std::pow(eps, 2.0 * alpha + beta - 1.0);
    b.delta = (1.0 + std::sqrt(1.0 + 4.0 * q)) / (2.0 * a);
    b.eta_residual = a * std::pow(b.delta, alpha + 1.0);
    b.regime = 2.0 * alpha + beta - 1.0 < 0.0 ? 1 : 2;
    const double t1 = a * b.delta * b.delta;
    const double t3 = std::pow(eps, alpha + beta);
    const double scale = std::max({std::abs(t1), std::abs(b.delta), std::abs(t3)});
    b.root_residual = std::abs(t1 - b.delta - t3) / scale;
    return b;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct ScalingReport {
    /// One row per (eps, delta), sorted by eps then delta.
    std::vector<CommutatorReport> rows;
    /// Slope of fs_norm vs delta at each eps, and vs eps at each delta.
    std::vector<LogLogFit> fs_delta_slopes;
    std::vector<LogLogFit> fs_eps_slopes;
    std::vector<LogLogFit> te_eps_slopes;
};

inline ScalingReport scaling_sweep(const RVMState& state, std::vector<double> eps_list,
                                   std::vector<double> delta_list, const NormConfig& cfg = {})
{
    if (eps_list.empty() || delta_list.empty())
        throw std::invalid_argument("scaling_sweep: empty scale list");
    std::sort(eps_list.begin(), eps_list.end());
    std::sort(delta_list.begin(), delta_list.end());
    if (std::adjacent_find(eps_list.begin(), eps_list.end()) != eps_list.end() ||
        std::adjacent_find(delta_list.begin(), delta_list.end()) != delta_list.end())
        throw std::invalid_argument("scaling_sweep: scale lists must be strictly monotone");
    // Validate every scale before any work.
    for (double e : eps_list)
        (void)make_x_kernel(state.grid(), e, cfg.profile);
    for (double d : delta_list)
        (void)make_xi_kernel(state.grid(), d, cfg.profile);

    ScalingReport rep;
    for (double e : eps_list)
        for (double d : delta_list)
            rep.rows.push_back(commutator_report(state, e, d, cfg));

    const std::size_t nd = delta_list.size();
    auto column = [&](auto pick, auto member, bool along_delta, std::size_t fixed) {
        std::vector<double> xs, ys;
        const std::size_t count = along_delta ? nd : eps_list.size();
        for (std::size_t i = 0; i < count; ++i) {
            const auto& row = along_delta ? rep.rows[fixed * nd + i] : rep.rows[i * nd + fixed];
            xs.push_back(pick(row));
            ys.push_back(row.*member);
        }
        return fit_loglog(xs, ys);
    };
    auto by_delta = [](const CommutatorReport& r) { return r.delta; };
    auto by_eps = [](const CommutatorReport& r) { return r.eps; };
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        rep.fs_delta_slopes.push_back(column(by_delta, &CommutatorReport::fs_norm, true, i));
    for (std::size_t j = 0; j < nd; ++j) {
        rep.fs_eps_slopes.push_back(column(by_eps, &CommutatorReport::fs_norm, false, j));
        rep.te_eps_slopes.push_back(column(by_eps, &CommutatorReport::te_norm, false, j));
    }
    return rep;
}

} // namespace rvm

#endif
