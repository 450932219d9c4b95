#ifndef RVM_BUDGET_HPP
#define RVM_BUDGET_HPP

#include "rvm/commutator.hpp"
#include "rvm/fft.hpp"
#include "rvm/fit.hpp"
#include "rvm/mollify.hpp"
#include "rvm/phase_grid.hpp"
#include "rvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

// Conservation time series, the weak-form entropy defect of the coarse-grained
// solution, and the local energy balance.

namespace rvm {

// ---------------------------------------------------------------------------
// Conservation
// ---------------------------------------------------------------------------

struct EntropySeries {
    std::string name;
    std::vector<double> values;
    double drift = 0.0;
};

struct ConservationDrifts {
    double mass = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double entropy_sq = 0.0;
    double kinetic = 0.0;
    double total = 0.0;
    /// Momentum drift relative to int |xi| f + int |E||B| at the first snapshot.
    double momentum = 0.0;
};

struct ConservationSeries {
    std::vector<ConservationSample> samples;
    std::vector<EntropySeries> entropies;
    ConservationDrifts drifts;
    double xi_boundary_max = 0.0;
};

/// max_k |q_k - q_0| / |q_0| (absolute when q_0 = 0).
inline double relative_drift(const std::vector<double>& q)
{
    if (q.empty())
        return 0.0;
    const double ref = std::abs(q.front());
    double d = 0.0;
    for (double v : q)
        d = std::max(d, std::abs(v - q.front()));
    return ref > 0.0 ? d / ref : d;
}

inline ConservationSeries conservation_series(const std::vector<ConservationSample>& samples,
                                              double momentum_scale)
{
    ConservationSeries out;
    out.samples = samples;
    auto column = [&](double ConservationSample::*m) {
        std::vector<double> v;
        v.reserve(samples.size());
        for (const auto& s : samples)
            v.push_back(s.*m);
        return v;
    };
    auto& d = out.drifts;
    d.mass = relative_drift(column(&ConservationSample::mass));
    d.l1 = relative_drift(column(&ConservationSample::l1));
    d.l2 = relative_drift(column(&ConservationSample::l2));
    d.linf = relative_drift(column(&ConservationSample::linf));
    d.entropy_sq = relative_drift(column(&ConservationSample::entropy_sq));
    d.kinetic = relative_drift(column(&ConservationSample::kinetic));
    d.total = relative_drift(column(&ConservationSample::total));
    double pm = 0.0;
    for (const auto& s : samples)
        pm = std::max({pm, std::abs(s.px - samples.front().px), std::abs(s.py - samples.front().py)});
    d.momentum = momentum_scale > 0.0 ? pm / momentum_scale : pm;
    return out;
}

/// Scale against which momentum drift is measured.
inline double momentum_scale(const RVMState& s)
{
    const auto& g = s.grid();
    const std::size_t nxi = g.xi_size();
    std::vector<double> mag(nxi);
    for (std::size_t j = 0; j < nxi; ++j) {
        const auto m = g.momentum(j);
        mag[j] = std::hypot(m[0], m[1]);
    }
    const auto& v = s.f.values;
    const double particles =
        pairwise_sum_by(v.size(), [&](std::size_t k) { return mag[k % nxi] * std::abs(v[k]); }) * g.cell_volume();
    const double fields = pairwise_sum_by(g.nx, [&](std::size_t i) {
                              return std::hypot(s.em.ex[i], s.em.ey[i]) * std::abs(s.em.bz[i]);
                          }) * g.dx();
    return particles + fields;
}

inline ConservationSeries conservation_report(const Trajectory& traj, const std::vector<EntropyFn>& entropies = {})
{
    if (traj.snapshots.empty())
        throw std::invalid_argument("conservation_report: empty trajectory");
    std::vector<ConservationSample> samples;
    for (const auto& s : traj.snapshots)
        samples.push_back(sample_conservation(s));
    auto out = conservation_series(samples, momentum_scale(traj.snapshots.front()));
    for (const auto& h : entropies) {
        EntropySeries es{h.name, {}, 0.0};
        for (const auto& s : traj.snapshots)
            es.values.push_back(entropy_integral(s.f, h));
        es.drift = relative_drift(es.values);
        out.entropies.push_back(std::move(es));
    }
    for (const auto& s : traj.snapshots)
        out.xi_boundary_max = std::max(out.xi_boundary_max, xi_boundary_max(s.f));
    return out;
}

// ---------------------------------------------------------------------------
// Entropy defect
// ---------------------------------------------------------------------------

/// Phi(t, x, xi) = T(t) Lambda(x) Theta_R(|xi|):
///   T       smooth bump supported on (t_begin, t_end)
///   Lambda  1, or 1 + 0.5 cos(2 pi mode x / L)
///   Theta_R 1 for |xi| <= R/2, 0 for |xi| >= R, smooth in between
struct TestFunction {
    double t_begin = 0.0;
    double t_end = 0.0; ///< t_end <= t_begin means "span of the trajectory"
    bool constant_x = true;
    int x_mode = 1;
    double radius = 0.0; ///< <= 0 means 0.9 xi_max

    static double psi(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
    static double dpsi(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

    /// Theta(r) and dTheta/dr for the unit radius profile.
    static std::pair<double, double> cutoff(double r)
    {
        if (r <= 0.5)
            return {1.0, 0.0};
        if (r >= 1.0)
            return {0.0, 0.0};
        const double u = 2.0 * (r - 0.5);
        const double a = psi(1.0 - u), b = psi(u);
        const double val = a / (a + b);
        const double du = (-dpsi(1.0 - u) * b - a * dpsi(u)) / ((a + b) * (a + b));
        return {val, 2.0 * du};
    }

    /// T(t) and T'(t).
    std::pair<double, double> time_factor(double t, double tb, double te) const
    {
        const double s = (2.0 * t - tb - te) / (te - tb);
        if (std::abs(s) >= 1.0)
            return {0.0, 0.0};
        const double q = 1.0 - s * s;
        const double val = std::exp(-1.0 / q);
        return {val, val * (-2.0 * s / (q * q)) * (2.0 / (te - tb))};
    }
};

struct DefectReport {
    double eps = 0.0;
    double delta = 0.0;
    /// |int dt int dx int dxi H(f^{eps,delta}) (d_t Phi + v^delta d_x Phi + F^{eps,delta} . grad_xi Phi)|
    double entropy_residual = 0.0;
    /// delta^{alpha+1} eps^{alpha-1} + eps^{alpha+beta} delta^{alpha-1} + delta^alpha (without C*)
    double bound_prediction = 0.0;
};

inline double defect_bound(double alpha, double beta, double eps, double delta)
{
    return std::pow(delta, alpha + 1.0) * std::pow(eps, alpha - 1.0) +
           std::pow(eps, alpha + beta) * std::pow(delta, alpha - 1.0) + std::pow(delta, alpha);
}

inline DefectReport entropy_defect(const Trajectory& traj, const EntropyFn& H, double alpha, double beta, double eps,
                                   double delta, const TestFunction& phi = {}, Profile profile = Profile::bump)
{
    const auto& snaps = traj.snapshots;
    if (snaps.size() < 3)
        throw std::invalid_argument("entropy_defect: at least three snapshots required");
    const auto& g = snaps.front().grid();
    const double tb = phi.t_end > phi.t_begin ? phi.t_begin : snaps.front().t;
    const double te = phi.t_end > phi.t_begin ? phi.t_end : snaps.back().t;
    const double R = phi.radius > 0.0 ? phi.radius : 0.9 * g.xi_max;
    const auto kx = make_x_kernel(g, eps, profile);
    const auto kxi = make_xi_kernel(g, delta, profile);
    const auto vd = velocity_mollified(g, kxi);
    const std::size_t nxi = g.xi_size();

    // Momentum factor and its gradient.
    std::vector<double> theta(nxi), dth1(nxi), dth2(nxi);
    for (std::size_t j = 0; j < nxi; ++j) {
        const auto xi = g.momentum(j);
        const double r = std::hypot(xi[0], xi[1]);
        const auto [val, d] = TestFunction::cutoff(r / R);
        theta[j] = val;
        if (r > 0.0) {
            dth1[j] = d / R * xi[0] / r;
            dth2[j] = d / R * xi[1] / r;
        }
    }
    std::vector<double> lambda(g.nx, 1.0), dlambda(g.nx, 0.0);
    if (!phi.constant_x) {
        const double k = 2.0 * std::numbers::pi * phi.x_mode / g.lx;
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            lambda[ix] = 1.0 + 0.5 * std::cos(k * g.x(ix));
            dlambda[ix] = -0.5 * k * std::sin(k * g.x(ix));
        }
    }

    std::vector<double> integrand(snaps.size(), 0.0);
    for (std::size_t n = 0; n < snaps.size(); ++n) {
        const auto& s = snaps[n];
        const auto [T, dT] = phi.time_factor(s.t, tb, te);
        if (T == 0.0 && dT == 0.0)
            continue;
        const DistField fm = mollify_xi(mollify_x(s.f, kx), kxi);
        const EMField em = mollify_em(s.em, kx);
        std::vector<double> rows(g.nx);
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const auto sl = fm.slice(ix);
            rows[ix] = pairwise_sum_by(nxi, [&](std::size_t j) {
                const double h = H.h(sl[j]);
                if (h == 0.0)
                    return 0.0;
                const double f1 = em.ex[ix] + vd.vy[j] * em.bz[ix];
                const double f2 = em.ey[ix] - vd.vx[j] * em.bz[ix];
                const double w = dT * lambda[ix] * theta[j] + T * vd.vx[j] * dlambda[ix] * theta[j] +
                                 T * lambda[ix] * (f1 * dth1[j] + f2 * dth2[j]);
                return h * w;
            });
        }
        integrand[n] = pairwise_sum(rows) * g.cell_volume();
    }
    double total = 0.0;
    for (std::size_t n = 1; n < snaps.size(); ++n)
        total += 0.5 * (snaps[n].t - snaps[n - 1].t) * (integrand[n] + integrand[n - 1]);
    return {eps, delta, std::abs(total), defect_bound(alpha, beta, eps, delta)};
}

struct DefectSweep {
    std::vector<DefectReport> rows;
    /// max residual / bound over the sweep
    double c_star = 0.0;
    /// Slope of residual against eps.
    LogLogFit decay;
};

/// Evaluates the defect along delta = balanced_path(alpha, beta, eps).delta.
inline DefectSweep defect_sweep(const Trajectory& traj, const EntropyFn& H, double alpha, double beta,
                                std::vector<double> eps_list, const TestFunction& phi = {},
                                Profile profile = Profile::bump)
{
    std::sort(eps_list.begin(), eps_list.end());
    DefectSweep out;
    std::vector<double> xs, ys;
    for (double e : eps_list) {
        const double d = balanced_path(alpha, beta, e).delta;
        auto r = entropy_defect(traj, H, alpha, beta, e, d, phi, profile);
        out.c_star = std::max(out.c_star, r.entropy_residual / r.bound_prediction);
        xs.push_back(e);
        ys.push_back(r.entropy_residual);
        out.rows.push_back(r);
    }
    out.decay = fit_loglog(xs, ys);
    return out;
}

struct RadiusPoint {
    double radius = 0.0;
    double residual = 0.0;
};

/// Defect as a function of the momentum cutoff radius at fixed scales.
inline std::vector<RadiusPoint> radius_sweep(const Trajectory& traj, const EntropyFn& H, double alpha, double beta,
                                             double eps, double delta, const std::vector<double>& radii,
                                             TestFunction phi = {}, Profile profile = Profile::bump)
{
    std::vector<RadiusPoint> out;
    for (double R : radii) {
        phi.radius = R;
        out.push_back({R, entropy_defect(traj, H, alpha, beta, eps, delta, phi, profile).entropy_residual});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local energy balance
// ---------------------------------------------------------------------------

/// Energy density int gamma f + (Ex^2 + Ey^2 + Bz^2) / 2.
inline std::vector<double> energy_density(const RVMState& s)
{
    auto e = kinetic_energy_density(s.f);
    for (std::size_t ix = 0; ix < e.size(); ++ix)
        e[ix] += 0.5 * (s.em.ex[ix] * s.em.ex[ix] + s.em.ey[ix] * s.em.ey[ix] + s.em.bz[ix] * s.em.bz[ix]);
    return e;
}

/// Energy flux int xi_x f + (E x B)_x with (E x B)_x = Ey Bz.
inline std::vector<double> energy_flux(const RVMState& s)
{
    auto q = kinetic_energy_flux(s.f);
    for (std::size_t ix = 0; ix < q.size(); ++ix)
        q[ix] += s.em.ey[ix] * s.em.bz[ix];
    return q;
}

struct LocalEnergyResidual {
    std::vector<double> times; ///< interior snapshot times
    std::vector<std::vector<double>> residual;
    /// Space-time L^2 norm over the interior snapshots.
    double l2 = 0.0;
};

/// (e_{n+1} - e_{n-1}) / (t_{n+1} - t_{n-1}) + d_x q_n at every interior snapshot.
inline LocalEnergyResidual local_energy_residual(const Trajectory& traj)
{
    const auto& s = traj.snapshots;
    if (s.size() < 3)
        throw std::invalid_argument("local_energy_residual: at least three snapshots required");
    const auto& g = s.front().grid();
    LocalEnergyResidual out;
    LineFft fft(g.nx);
    double sum = 0.0;
    for (std::size_t n = 1; n + 1 < s.size(); ++n) {
        const auto ep = energy_density(s[n + 1]);
        const auto em = energy_density(s[n - 1]);
        const auto q = energy_flux(s[n]);
        std::copy(q.begin(), q.end(), fft.real().begin());
        spectral_derivative(fft, g.lx);
        const double dt = s[n + 1].t - s[n - 1].t;
        std::vector<double> r(g.nx);
        for (std::size_t ix = 0; ix < g.nx; ++ix)
            r[ix] = (ep[ix] - em[ix]) / dt + fft.real()[ix];
        const double step = 0.5 * dt;
        sum += step * g.dx() * pairwise_sum_by(g.nx, [&](std::size_t i) { return r[i] * r[i]; });
        out.times.push_back(s[n].t);
        out.residual.push_back(std::move(r));
    }
    out.l2 = std::sqrt(sum);
    return out;
}

} // namespace rvm

#endif
