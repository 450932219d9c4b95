#ifndef RVM_SYNTH_HPP
#define RVM_SYNTH_HPP

#include "rvm/exponents.hpp"
#include "rvm/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Synthetic fields with a prescribed increment exponent a in (0, 1).
//
//   weierstrass     sum_{k=0..K} 2^{-k a} cos(2^k 2 pi x / L + phi_k)
//   random_fourier  sum_{n>=1} (1 + n)^{-(a + 1/2)} cos(2 pi n x / L + phi_n)
//   step            indicator of [0, L/2)
//   gaussian_bump   exp(-(x - L/2)^2 / (2 (L/16)^2))
//
// Phases come from a counter-based hash of (seed, stream, mode), so every mode
// is reproducible independently of evaluation order.

namespace rvm {

enum class SynthKind { weierstrass, random_fourier, step, gaussian_bump };

inline SynthKind parse_synth_kind(std::string_view name)
{
    if (name == "weierstrass")
        return SynthKind::weierstrass;
    if (name == "random_fourier")
        return SynthKind::random_fourier;
    if (name == "step")
        return SynthKind::step;
    if (name == "gaussian_bump")
        return SynthKind::gaussian_bump;
    throw std::invalid_argument("unknown synth kind '" + std::string(name) + "'");
}

inline std::string_view to_string(SynthKind k)
{
    switch (k) {
    case SynthKind::weierstrass:
        return "weierstrass";
    case SynthKind::random_fourier:
        return "random_fourier";
    case SynthKind::step:
        return "step";
    default:
        return "gaussian_bump";
    }
}

/// Which phase-space directions carry the prescribed roughness; the others
/// get a smooth compactly supported momentum envelope.
enum class SynthAxes { x, xi, both };

struct SynthSpec {
    SynthKind kind = SynthKind::weierstrass;
    double a = 0.5;
    std::uint64_t seed = 0;
    double amplitude = 1.0;
    SynthAxes axes = SynthAxes::both;
    /// Highest mode (weierstrass: highest octave K; random_fourier: highest n).
    /// Defaults to the largest value strictly below Nyquist.
    std::optional<std::size_t> max_mode;
};

/// SplitMix64 finalizer used as a stateless hash.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform phase in [0, 2 pi) for (seed, stream, mode).
inline double mode_phase(std::uint64_t seed, std::uint64_t stream, std::uint64_t mode)
{
    const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ mode);
    return 2.0 * std::numbers::pi * static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Periodic line of n samples x_i = i L / n. `stream` separates independent
/// lines generated from one seed.
inline std::vector<double> generate_line(const SynthSpec& spec, std::size_t n, double length,
                                         std::uint64_t stream = 0)
{
    if (n < 4)
        throw std::invalid_argument("generate_line: need at least 4 samples");
    std::vector<double> out(n, 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    // Strictly below Nyquist: frequency m must satisfy 2 m < n.
    const std::size_t nyquist_limit = (n - 1) / 2;
    switch (spec.kind) {
    case SynthKind::weierstrass: {
        if (!(spec.a > 0.0 && spec.a < 1.0))
            throw std::invalid_argument("generate: exponent must lie in (0, 1)");
        std::size_t top = 0;
        while ((std::size_t{1} << (top + 1)) <= nyquist_limit)
            ++top;
        const std::size_t K = spec.max_mode.value_or(top);
        if ((std::size_t{1} << K) > nyquist_limit)
            throw std::invalid_argument("generate: weierstrass octave above Nyquist");
        for (std::size_t k = 0; k <= K; ++k) {
            const double amp = std::pow(2.0, -static_cast<double>(k) * spec.a);
            const double freq = static_cast<double>(std::size_t{1} << k);
            const double phi = mode_phase(spec.seed, stream, k);
            for (std::size_t i = 0; i < n; ++i)
                out[i] += amp * std::cos(two_pi * freq * static_cast<double>(i) / static_cast<double>(n) + phi);
        }
        break;
    }
    case SynthKind::random_fourier: {
        if (!(spec.a > 0.0 && spec.a < 1.0))
            throw std::invalid_argument("generate: exponent must lie in (0, 1)");
        const std::size_t top = spec.max_mode.value_or(nyquist_limit);
        if (top > nyquist_limit)
            throw std::invalid_argument("generate: random_fourier mode above Nyquist");
        for (std::size_t m = 1; m <= top; ++m) {
            const double amp = std::pow(1.0 + static_cast<double>(m), -(spec.a + 0.5));
            const double phi = mode_phase(spec.seed, stream, m);
            // Exact integer phase index keeps large mode numbers accurate.
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t idx = (m * i) % n;
                out[i] += amp * std::cos(two_pi * static_cast<double>(idx) / static_cast<double>(n) + phi);
            }
        }
        break;
    }
    case SynthKind::step:
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 2 * i < n ? 1.0 : 0.0;
        break;
    case SynthKind::gaussian_bump: {
        const double w = length / 16.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) * length / static_cast<double>(n) - 0.5 * length;
            out[i] = std::exp(-x * x / (2.0 * w * w));
        }
        break;
    }
    }
    for (double& v : out)
        v *= spec.amplitude;
    return out;
}

/// Smooth radial momentum envelope: exp(1 - 1/(1 - (|xi|/R)^2)) inside R = 0.75 xi_max,
/// equal to 1 at the origin and vanishing with all derivatives at R.
inline std::vector<double> momentum_envelope(const PhaseGrid& g, double radius_fraction = 0.75)
{
    const double R = radius_fraction * g.xi_max;
    std::vector<double> env(g.xi_size());
    for (std::size_t j = 0; j < env.size(); ++j) {
        const auto xi = g.momentum(j);
        const double r2 = (xi[0] * xi[0] + xi[1] * xi[1]) / (R * R);
        env[j] = r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    }
    return env;
}

/// Momentum roughness: product of independent rough lines along each momentum
/// axis (streams 1 and 2), sampled at the cell centres.
inline std::vector<double> momentum_roughness(const SynthSpec& spec, const PhaseGrid& g)
{
    SynthSpec unit = spec;
    unit.amplitude = 1.0;
    std::vector<std::vector<double>> lines;
    for (std::size_t a = 0; a < g.xi_dims(); ++a)
        lines.push_back(generate_line(unit, g.nxi[a], g.xi_extent(), 1 + a));
    std::vector<double> out(g.xi_size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const std::size_t j1 = j / g.n2(), j2 = j % g.n2();
        out[j] = lines[0][j1] * (g.xi_dims() == 2 ? lines[1][j2] : 1.0);
    }
    return out;
}

/// Phase-space field A(x) R(xi) env(xi) (tensor product, one exponent a for
/// every rough direction). A is the x-line (stream 0); with axes = xi it is 1,
/// with axes = x the momentum factor is the envelope alone.
inline DistField generate(const SynthSpec& spec, const PhaseGrid& g)
{
    SynthSpec unit = spec;
    unit.amplitude = 1.0;
    std::vector<double> ax(g.nx, 1.0);
    if (spec.axes != SynthAxes::xi)
        ax = generate_line(unit, g.nx, g.lx, 0);
    auto b = momentum_envelope(g);
    if (spec.axes != SynthAxes::x) {
        const auto r = momentum_roughness(unit, g);
        for (std::size_t j = 0; j < b.size(); ++j)
            b[j] *= r[j];
    }
    DistField f(g);
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        auto s = f.slice(ix);
        for (std::size_t j = 0; j < s.size(); ++j)
            s[j] = spec.amplitude * ax[ix] * b[j];
    }
    return f;
}

struct OnsagerEnsemble {
    RVMState state;
    double condition = 0.0; ///< alpha beta + beta + 3 alpha - 1
    bool positive = false;
};

/// Nonnegative f with exponent alpha in every phase-space direction and
/// fields (Ex, Ey, Bz) with exponent beta, all of one rough kind.
///   f = env(xi) (1 + A(x) R(xi) / max|A R|)
/// On a few hundred cells the random Fourier sum reads rougher than its
/// nominal exponent over 4-40 cells (about 0.41 for a = 0.5 at N = 512); the
/// lacunary series does not.
inline OnsagerEnsemble onsager_ensemble(double alpha, double beta, const PhaseGrid& g, std::uint64_t seed,
                                        SynthKind kind = SynthKind::random_fourier)
{
    if (kind != SynthKind::random_fourier && kind != SynthKind::weierstrass)
        throw std::invalid_argument("onsager_ensemble: kind must be weierstrass or random_fourier");
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("onsager_ensemble: exponents must lie in (0, 1)");
    SynthSpec fs{kind, alpha, seed, 1.0, SynthAxes::both, std::nullopt};
    const auto ax = generate_line(fs, g.nx, g.lx, 0);
    const auto r = momentum_roughness(fs, g);
    const auto env = momentum_envelope(g);
    double amax = 0.0, rmax = 0.0;
    for (double v : ax)
        amax = std::max(amax, std::abs(v));
    for (double v : r)
        rmax = std::max(rmax, std::abs(v));
    const double scale = amax * rmax > 0.0 ? 1.0 / (amax * rmax) : 0.0;
    DistField f(g);
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        auto s = f.slice(ix);
        for (std::size_t j = 0; j < s.size(); ++j)
            s[j] = std::max(0.0, env[j] * (1.0 + scale * ax[ix] * r[j]));
    }
    SynthSpec es{kind, beta, seed, 1.0, SynthAxes::x, std::nullopt};
    EMField em(g.nx);
    em.ex = generate_line(es, g.nx, g.lx, 10);
    if (g.xi_dims() == 2) {
        em.ey = generate_line(es, g.nx, g.lx, 11);
        em.bz = generate_line(es, g.nx, g.lx, 12);
    }
    OnsagerEnsemble out{RVMState(0.0, std::move(f), std::move(em)), onsager_condition(alpha, beta), false};
    out.positive = out.condition > 0.0;
    return out;
}

} // namespace rvm

#endif
