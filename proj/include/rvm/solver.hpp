#ifndef RVM_SOLVER_HPP
#define RVM_SOLVER_HPP

#include "rvm/fft.hpp"
#include "rvm/phase_grid.hpp"
#include "rvm/spline.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Strang-split semi-Lagrangian solver for the 1D2V (and 1D1V electrostatic)
// relativistic Vlasov-Maxwell system on a periodic spatial domain with a
// uniform neutralizing background.
//
// One step of length dt:
//   A(dt/2)  x-advection f(x - v_x dt/2, xi), with Ex advanced by the exactly
//            time-integrated current so that d_x Ex = rho - mean(rho) holds
//            mode by mode
//   B(dt/2)  transverse Maxwell update of (Ey, Bz) with frozen j_y, solved
//            exactly along the characteristics Ey +- Bz
//   C(dt)    momentum advection along the frozen-field Boris map
//            (half electric kick, magnetic rotation by dt Bz / gamma, half kick),
//            applied as three pullbacks
//   B(dt/2), A(dt/2)

namespace rvm {

enum class Interpolation { spectral, cubic_spline };

inline Interpolation parse_interpolation(std::string_view name)
{
    if (name == "spectral")
        return Interpolation::spectral;
    if (name == "cubic_spline")
        return Interpolation::cubic_spline;
    throw std::invalid_argument("unknown interpolation '" + std::string(name) + "'");
}

inline std::string_view to_string(Interpolation i)
{
    return i == Interpolation::spectral ? "spectral" : "cubic_spline";
}

struct SolverConfig {
    double dt = 0.0;
    std::size_t n_steps = 0;
    /// Interpolation for the x-advection and the electric kicks. The magnetic
    /// rotation always uses tensor-product cubic splines.
    Interpolation interpolation = Interpolation::spectral;
    /// Clip negative values after every step.
    bool clip_limiter = false;
    /// Ignore the fields entirely (pure transport x' = v(xi)).
    bool free_streaming = false;

    static SolverConfig defaults_for(const PhaseGrid& grid)
    {
        SolverConfig cfg;
        cfg.dt = 0.1 * grid.dx();
        return cfg;
    }
};

/// dt * max|v| / dx; informational only (the scheme has no CFL limit).
inline double cfl_number(const PhaseGrid& grid, const SolverConfig& cfg)
{
    double vmax = 0.0;
    const KinematicTable kin(grid);
    for (double v : kin.vx)
        vmax = std::max(vmax, std::abs(v));
    return cfg.dt * vmax / grid.dx();
}

enum class Preset { uniform_equilibrium, landau_perturbation, weibel_anisotropy, free_streaming_test };

inline Preset parse_preset(std::string_view name)
{
    if (name == "uniform_equilibrium")
        return Preset::uniform_equilibrium;
    if (name == "landau_perturbation")
        return Preset::landau_perturbation;
    if (name == "weibel_anisotropy")
        return Preset::weibel_anisotropy;
    if (name == "free_streaming_test")
        return Preset::free_streaming_test;
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

struct InitParams {
    double density = 1.0;
    /// Thermal momentum spread along xi_1 (and xi_2 unless anisotropic).
    double thermal = 1.0;
    /// Thermal spread along xi_2 for weibel_anisotropy.
    double thermal_perp = 0.5;
    /// Relative density perturbation (landau / free streaming) or Bz seed
    /// amplitude (weibel).
    double amplitude = 1e-3;
    /// Perturbation wavenumber index: k = 2 pi mode / lx.
    int mode = 1;
};

/// Replaces Ex by the zero-mean solution of d_x Ex = rho - mean(rho).
inline void solve_gauss(RVMState& state)
{
    const auto& g = state.grid();
    auto rho = density(state.f);
    LineFft fft(g.nx);
    std::copy(rho.begin(), rho.end(), fft.real().begin());
    spectral_antiderivative(fft, g.lx, 0.0);
    std::copy(fft.real().begin(), fft.real().end(), state.em.ex.begin());
}

/// max_x |d_x Ex - (rho - mean rho)| restricted to the resolved modes
/// 0 < |k| < Nyquist.
inline double gauss_residual(const RVMState& state)
{
    const auto& g = state.grid();
    const auto rho = density(state.f);
    LineFft a(g.nx), b(g.nx);
    std::copy(state.em.ex.begin(), state.em.ex.end(), a.real().begin());
    std::copy(rho.begin(), rho.end(), b.real().begin());
    a.forward();
    b.forward();
    auto sa = a.spectrum();
    auto sb = b.spectrum();
    sa[0] = 0.0;
    for (std::size_t m = 1; m < sa.size(); ++m) {
        if (a.is_nyquist(m))
            sa[m] = 0.0;
        else
            sa[m] = std::complex<double>(0.0, a.wavenumber(m, g.lx)) * sa[m] - sb[m];
    }
    a.inverse();
    double r = 0.0;
    for (double v : a.real())
        r = std::max(r, std::abs(v));
    return r;
}

inline RVMState initialize(Preset preset, const PhaseGrid& grid, const InitParams& params = {})
{
    const double k = 2.0 * std::numbers::pi * params.mode / grid.lx;
    const bool two_d = grid.xi_dims() == 2;
    double s1 = params.thermal;
    double s2 = params.thermal;
    if (preset == Preset::weibel_anisotropy) {
        if (!two_d)
            throw std::invalid_argument("weibel_anisotropy needs two momentum dimensions");
        s2 = params.thermal_perp;
    }
    const double norm = two_d ? params.density / (2.0 * std::numbers::pi * s1 * s2)
                              : params.density / (std::sqrt(2.0 * std::numbers::pi) * s1);
    std::vector<double> maxwellian(grid.xi_size());
    for (std::size_t j = 0; j < grid.xi_size(); ++j) {
        const auto xi = grid.momentum(j);
        maxwellian[j] = norm * std::exp(-0.5 * (xi[0] * xi[0] / (s1 * s1) + xi[1] * xi[1] / (s2 * s2)));
    }

    DistField f(grid);
    EMField em(grid.nx);
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        double profile = 1.0;
        if (preset == Preset::landau_perturbation || preset == Preset::free_streaming_test)
            profile += params.amplitude * std::cos(k * grid.x(ix));
        for (std::size_t j = 0; j < grid.xi_size(); ++j)
            f(ix, j) = profile * maxwellian[j];
        if (preset == Preset::weibel_anisotropy)
            em.bz[ix] = params.amplitude * std::sin(k * grid.x(ix));
    }
    RVMState state(0.0, std::move(f), std::move(em));
    if (preset != Preset::free_streaming_test)
        solve_gauss(state);
    return state;
}

inline RVMState initialize(std::string_view preset, const PhaseGrid& grid, const InitParams& params = {})
{
    return initialize(parse_preset(preset), grid, params);
}

namespace detail {

/// f(x, xi) <- f(x - v_x(xi) tau, xi); when coupled, Ex absorbs the exactly
/// integrated current of the substep.
inline void advect_x(RVMState& state, double tau, const SolverConfig& cfg)
{
    const auto& g = state.grid();
    const KinematicTable kin(g);
    const bool coupled = !cfg.free_streaming;
    std::vector<double> rho_before, jx_before;
    if (coupled) {
        rho_before = density(state.f);
        jx_before = current(state.f).jx;
    }
    const std::size_t nxi = g.xi_size();
    auto& values = state.f.values;
    // Columns are gathered in blocks so the strided x-lines are read with
    // contiguous inner loops.
    constexpr std::size_t block = 32;
    const std::size_t nblocks = (nxi + block - 1) / block;
#pragma omp parallel
    {
        LineFft fft(g.nx);
        std::vector<double> coeff;
        std::vector<double> buf(block * g.nx);
#pragma omp for schedule(static)
        for (std::size_t b = 0; b < nblocks; ++b) {
            const std::size_t j0 = b * block;
            const std::size_t nb = std::min(block, nxi - j0);
            for (std::size_t ix = 0; ix < g.nx; ++ix)
                for (std::size_t jj = 0; jj < nb; ++jj)
                    buf[jj * g.nx + ix] = values[ix * nxi + j0 + jj];
            for (std::size_t jj = 0; jj < nb; ++jj) {
                const double shift = kin.vx[j0 + jj] * tau;
                if (shift == 0.0)
                    continue;
                auto line = fft.real();
                std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(jj * g.nx), g.nx, line.begin());
                if (cfg.interpolation == Interpolation::spectral)
                    spectral_shift(fft, shift, g.lx);
                else
                    spline::shift_periodic(fft, shift / g.dx(), coeff);
                std::copy(line.begin(), line.end(), buf.begin() + static_cast<std::ptrdiff_t>(jj * g.nx));
            }
            for (std::size_t ix = 0; ix < g.nx; ++ix)
                for (std::size_t jj = 0; jj < nb; ++jj)
                    values[ix * nxi + j0 + jj] = buf[jj * g.nx + ix];
        }
    }
    if (!coupled)
        return;
    const auto rho_after = density(state.f);
    const auto jx_after = current(state.f).jx;
    // Delta Ex: d_x dEx = d rho on the resolved modes, mean from the mean current.
    const double mean_j = 0.5 * (pairwise_sum(jx_before) + pairwise_sum(jx_after)) / static_cast<double>(g.nx);
    LineFft fft(g.nx);
    auto line = fft.real();
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        line[ix] = rho_after[ix] - rho_before[ix];
    spectral_antiderivative(fft, g.lx, -tau * mean_j);
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        state.em.ex[ix] += line[ix];
}

/// Exact transverse Maxwell update over tau with j_y frozen:
///   d_t Ey = -d_x Bz - j_y,  d_t Bz = -d_x Ey.
inline void update_transverse(RVMState& state, double tau)
{
    const auto& g = state.grid();
    if (g.xi_dims() < 2)
        return;
    const auto jy = current(state.f).jy;
    LineFft fe(g.nx), fb(g.nx), fj(g.nx);
    std::copy(state.em.ey.begin(), state.em.ey.end(), fe.real().begin());
    std::copy(state.em.bz.begin(), state.em.bz.end(), fb.real().begin());
    std::copy(jy.begin(), jy.end(), fj.real().begin());
    fe.forward();
    fb.forward();
    fj.forward();
    auto se = fe.spectrum();
    auto sb = fb.spectrum();
    auto sj = fj.spectrum();
    using cplx = std::complex<double>;
    for (std::size_t m = 0; m < se.size(); ++m) {
        const double kappa = fe.wavenumber(m, g.lx);
        const cplx plus = se[m] + sb[m];
        const cplx minus = se[m] - sb[m];
        cplx right, left, src_right, src_left;
        if (m == 0) {
            right = 1.0;
            left = 1.0;
            src_right = tau;
            src_left = tau;
        } else if (fe.is_nyquist(m)) {
            right = std::cos(kappa * tau);
            left = right;
            src_right = std::sin(kappa * tau) / kappa;
            src_left = src_right;
        } else {
            right = std::polar(1.0, -kappa * tau);
            left = std::polar(1.0, kappa * tau);
            src_right = (1.0 - right) / cplx(0.0, kappa);
            src_left = (left - 1.0) / cplx(0.0, kappa);
        }
        const cplx plus_new = right * plus - src_right * sj[m];
        const cplx minus_new = left * minus - src_left * sj[m];
        se[m] = 0.5 * (plus_new + minus_new);
        sb[m] = 0.5 * (plus_new - minus_new);
    }
    fe.inverse();
    fb.inverse();
    std::copy(fe.real().begin(), fe.real().end(), state.em.ey.begin());
    std::copy(fb.real().begin(), fb.real().end(), state.em.bz.begin());
}

/// Pullback by a uniform momentum shift along one axis of a momentum slice.
inline void kick_axis(std::span<double> slice, const PhaseGrid& g, std::size_t axis, double shift,
                      Interpolation interp, LineFft& fft, std::vector<double>& coeff, std::vector<double>& scratch)
{
    if (std::abs(shift) <= 1e-15 * g.dxi(axis))
        return;
    const std::size_t n1 = g.n1();
    const std::size_t n2 = g.n2();
    const std::size_t len = axis == 0 ? n1 : n2;
    const std::size_t lines = axis == 0 ? n2 : n1;
    const std::size_t stride = axis == 0 ? n2 : 1;
    const double h = g.dxi(axis);
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t base = axis == 0 ? l : l * n2;
        auto line = fft.real();
        for (std::size_t i = 0; i < len; ++i)
            line[i] = slice[base + i * stride];
        if (interp == Interpolation::spectral)
            spectral_shift(fft, shift, g.xi_extent());
        else
            spline::shift_zero_extended(line, shift / h, coeff, scratch);
        for (std::size_t i = 0; i < len; ++i)
            slice[base + i * stride] = line[i];
    }
}

/// A rotation that moves no node by more than 1e-15 cells is the identity in
/// double precision.
inline bool rotation_is_identity(const PhaseGrid& g, double bz, double dt)
{
    return std::abs(bz) * dt * g.xi_max <= 1e-15 * std::min(g.dxi(0), g.dxi(1));
}

/// f(xi) <- f(R xi) where R rotates by +dt Bz / gamma(xi) (pullback of the
/// magnetic part of the Boris map).
inline void rotate_slice(std::span<double> slice, const PhaseGrid& g, double bz, double dt,
                         spline::ZeroExtendedSpline2D& spl)
{
    spl.fit(slice);
    const double h1 = g.dxi(0), h2 = g.dxi(1);
    for (std::size_t j = 0; j < g.xi_size(); ++j) {
        const auto xi = g.momentum(j);
        const double angle = dt * bz / gamma(xi);
        const double c = std::cos(angle), s = std::sin(angle);
        const double src1 = c * xi[0] - s * xi[1];
        const double src2 = s * xi[0] + c * xi[1];
        slice[j] = spl((src1 + g.xi_max) / h1 - 0.5, (src2 + g.xi_max) / h2 - 0.5);
    }
}

inline void advect_xi(RVMState& state, double dt, const SolverConfig& cfg)
{
    const auto& g = state.grid();
    const bool two_d = g.xi_dims() == 2;
#pragma omp parallel
    {
        LineFft fft1(g.n1());
        LineFft fft2(g.n2());
        std::vector<double> coeff, scratch;
        spline::ZeroExtendedSpline2D spl(g.n1(), g.n2());
#pragma omp for schedule(static)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            auto slice = state.f.slice(ix);
            const auto e = state.em.at(ix);
            if (!two_d) {
                kick_axis(slice, g, 0, e.ex * dt, cfg.interpolation, fft1, coeff, scratch);
                continue;
            }
            if (rotation_is_identity(g, e.bz, dt)) {
                // Without rotation the two half kicks commute into one.
                kick_axis(slice, g, 0, e.ex * dt, cfg.interpolation, fft1, coeff, scratch);
                kick_axis(slice, g, 1, e.ey * dt, cfg.interpolation, fft2, coeff, scratch);
                continue;
            }
            const double half = 0.5 * dt;
            kick_axis(slice, g, 0, e.ex * half, cfg.interpolation, fft1, coeff, scratch);
            kick_axis(slice, g, 1, e.ey * half, cfg.interpolation, fft2, coeff, scratch);
            rotate_slice(slice, g, e.bz, dt, spl);
            kick_axis(slice, g, 0, e.ex * half, cfg.interpolation, fft1, coeff, scratch);
            kick_axis(slice, g, 1, e.ey * half, cfg.interpolation, fft2, coeff, scratch);
        }
    }
}

inline void check_finite(const RVMState& state)
{
    const auto& g = state.grid();
    for (std::size_t k = 0; k < state.f.values.size(); ++k) {
        if (!std::isfinite(state.f.values[k])) {
            std::ostringstream msg;
            msg << "non-finite f at t=" << state.t << " (ix=" << k / g.xi_size() << ", jxi=" << k % g.xi_size()
                << ")";
            throw std::runtime_error(msg.str());
        }
    }
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        if (!std::isfinite(state.em.ex[ix]) || !std::isfinite(state.em.ey[ix]) || !std::isfinite(state.em.bz[ix])) {
            std::ostringstream msg;
            msg << "non-finite field at t=" << state.t << " (ix=" << ix << ")";
            throw std::runtime_error(msg.str());
        }
    }
}

} // namespace detail

/// Shifts every momentum slice along x by v_x(xi) * tau (no field coupling).
/// Exposed for reversibility checks.
inline void shift_x(RVMState& state, double tau, Interpolation interp = Interpolation::spectral)
{
    SolverConfig cfg;
    cfg.interpolation = interp;
    cfg.free_streaming = true;
    detail::advect_x(state, tau, cfg);
}

/// Advances the state by one Strang-split step of length cfg.dt.
inline RVMState step(const RVMState& state, const SolverConfig& cfg)
{
    if (!(cfg.dt > 0.0))
        throw std::invalid_argument("step: dt must be positive");
    RVMState next = state;
    const double half = 0.5 * cfg.dt;
    detail::advect_x(next, half, cfg);
    if (!cfg.free_streaming) {
        detail::update_transverse(next, half);
        detail::advect_xi(next, cfg.dt, cfg);
        detail::update_transverse(next, half);
    }
    detail::advect_x(next, half, cfg);
    if (cfg.clip_limiter)
        for (double& v : next.f.values)
            v = std::max(v, 0.0);
    next.t = state.t + cfg.dt;
    detail::check_finite(next);
    return next;
}

struct Trajectory {
    std::vector<RVMState> snapshots;
    /// Scalar functionals at every step, including the initial state.
    std::vector<ConservationSample> series;
};

/// Iterates `step`, keeping a snapshot every `stride` steps (the initial state
/// is always kept, the final state is kept when n_steps is a multiple of stride).
inline Trajectory run(const RVMState& initial, const SolverConfig& cfg, std::size_t stride = 1)
{
    if (stride == 0)
        throw std::invalid_argument("run: stride must be positive");
    Trajectory traj;
    traj.snapshots.push_back(initial);
    traj.series.push_back(sample_conservation(initial));
    RVMState current_state = initial;
    for (std::size_t n = 1; n <= cfg.n_steps; ++n) {
        current_state = step(current_state, cfg);
        traj.series.push_back(sample_conservation(current_state));
        if (n % stride == 0)
            traj.snapshots.push_back(current_state);
    }
    return traj;
}

} // namespace rvm

#endif
