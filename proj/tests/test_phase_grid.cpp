#include "rvm/phase_grid.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace rvm;

namespace {

constexpr double pi = std::numbers::pi;

DistField fill(const PhaseGrid& g, auto fn)
{
    DistField f(g);
    for (std::size_t ix = 0; ix < g.nx; ++ix)
        for (std::size_t j = 0; j < g.xi_size(); ++j)
            f(ix, j) = fn(g.x(ix), g.momentum(j));
    return f;
}

double gaussian2(const Momentum<2>& xi, double a = 0.0, double b = 0.0)
{
    const double d1 = xi[0] - a, d2 = xi[1] - b;
    return std::exp(-0.5 * (d1 * d1 + d2 * d2)) / (2.0 * pi);
}

// Plain midpoint sum on an n x n momentum grid, long double accumulation.
template <typename Fn>
double refined_quadrature(double xi_max, std::size_t n, Fn fn)
{
    const double h = 2.0 * xi_max / static_cast<double>(n);
    long double s = 0.0L;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            s += fn(Momentum<2>{-xi_max + (a + 0.5) * h, -xi_max + (b + 0.5) * h});
    return static_cast<double>(s * h * h);
}

} // namespace

TEST(PhaseGrid, RejectsInvalidShapes)
{
    EXPECT_THROW(PhaseGrid(0, 1.0, {8}, 1.0), std::invalid_argument);
    EXPECT_THROW(PhaseGrid(8, -1.0, {8}, 1.0), std::invalid_argument);
    EXPECT_THROW(PhaseGrid(8, 1.0, {}, 1.0), std::invalid_argument);
    EXPECT_THROW(PhaseGrid(8, 1.0, {8, 8, 8}, 1.0), std::invalid_argument);
    EXPECT_THROW(PhaseGrid(8, 1.0, {8, 0}, 1.0), std::invalid_argument);
    EXPECT_THROW(PhaseGrid(8, 1.0, {8}, 0.0), std::invalid_argument);
}

TEST(PhaseGrid, LayoutIsXMajor)
{
    const PhaseGrid g(3, 1.0, {4, 5}, 2.0);
    EXPECT_EQ(g.index(1, g.xi_index(2, 3)), (1u * 4 + 2) * 5 + 3);
    const auto m = g.momentum(g.xi_index(0, 4));
    EXPECT_DOUBLE_EQ(m[0], -2.0 + 0.5);
    EXPECT_DOUBLE_EQ(m[1], -2.0 + 4.5 * 0.8);
    EXPECT_TRUE(g.on_xi_boundary(g.xi_index(0, 2)));
    EXPECT_FALSE(g.on_xi_boundary(g.xi_index(1, 2)));
}

TEST(Density, ConstantField)
{
    const PhaseGrid g(8, 2.0, {16, 16}, 3.0);
    const auto rho = density(DistField(g, 0.7));
    for (double r : rho)
        EXPECT_NEAR(r, 0.7 * 36.0, 1e-13);
    for (double r : density(DistField(g)))
        EXPECT_EQ(r, 0.0);
}

TEST(Density, GaussianMatchesRefinedQuadrature)
{
    const PhaseGrid g(4, 1.0, {64, 64}, 8.0);
    const auto f = fill(g, [](double, const Momentum<2>& xi) { return gaussian2(xi); });
    const double oracle = refined_quadrature(8.0, 640, [](const Momentum<2>& xi) { return gaussian2(xi); });
    const double exact = std::pow(std::erf(8.0 / std::sqrt(2.0)), 2);
    EXPECT_NEAR(oracle, exact, 1e-12);
    for (double r : density(f))
        EXPECT_NEAR(r / oracle, 1.0, 1e-8);
}

TEST(Density, IsLinear)
{
    const PhaseGrid g(8, 1.0, {12}, 2.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DistField f(g), h(g);
    for (auto& v : f.values)
        v = u(rng);
    for (std::size_t k = 0; k < f.values.size(); ++k)
        h.values[k] = 3.0 * f.values[k];
    const auto a = density(f), b = density(h);
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_NEAR(b[i], 3.0 * a[i], 1e-14 * b[i]);
}

TEST(Current, EvenFieldCarriesNone)
{
    const PhaseGrid g(4, 1.0, {32, 32}, 6.0);
    const auto f = fill(g, [](double x, const Momentum<2>& xi) { return (1.0 + 0.3 * std::cos(x)) * gaussian2(xi); });
    const auto j = current(f);
    for (std::size_t i = 0; i < g.nx; ++i) {
        EXPECT_LE(std::abs(j.jx[i]), 1e-14);
        EXPECT_LE(std::abs(j.jy[i]), 1e-14);
    }
    const auto z = current(DistField(g));
    EXPECT_EQ(*std::max_element(z.jx.begin(), z.jx.end()), 0.0);
}

TEST(Current, DriftingGaussianMatchesRefinedQuadrature)
{
    const PhaseGrid g(2, 1.0, {64, 64}, 8.0);
    auto fn = [](const Momentum<2>& xi) { return gaussian2(xi, 1.0, -0.5); };
    const auto f = fill(g, [&](double, const Momentum<2>& xi) { return fn(xi); });
    const double jx = refined_quadrature(8.0, 640, [&](const Momentum<2>& xi) { return velocity(xi)[0] * fn(xi); });
    const double jy = refined_quadrature(8.0, 640, [&](const Momentum<2>& xi) { return velocity(xi)[1] * fn(xi); });
    const auto j = current(f);
    EXPECT_NEAR(j.jx[0] / jx, 1.0, 1e-6);
    EXPECT_NEAR(j.jy[1] / jy, 1.0, 1e-6);
}

TEST(Energy, FieldOnly)
{
    const PhaseGrid g(16, 3.0, {8}, 1.0);
    RVMState s(0.0, DistField(g), EMField(g.nx));
    EXPECT_EQ(total_energy(s).total, 0.0);
    std::fill(s.em.ex.begin(), s.em.ex.end(), 0.4);
    EXPECT_NEAR(total_energy(s).total, 3.0 * 0.16 / 2.0, 1e-15);
}

TEST(Energy, GaussianKineticMatchesRefinedQuadrature)
{
    const PhaseGrid g(4, 2.0, {64, 64}, 8.0);
    auto fn = [](const Momentum<2>& xi) { return gaussian2(xi, 0.5, 0.0); };
    RVMState s(0.0, fill(g, [&](double, const Momentum<2>& xi) { return fn(xi); }), EMField(g.nx));
    const double oracle = 2.0 * refined_quadrature(8.0, 640, [&](const Momentum<2>& xi) { return gamma(xi) * fn(xi); });
    const auto e = total_energy(s);
    EXPECT_NEAR(e.kinetic / oracle, 1.0, 1e-6);
    EXPECT_NEAR(e.kinetic - e.kinetic_minus_rest, mass(s.f), 1e-12);
}

TEST(LpNorm, ConstantAndMax)
{
    const PhaseGrid g(8, 2.0, {10, 10}, 1.5);
    const DistField c(g, 0.5);
    const double measure = 2.0 * 9.0;
    for (double p : {1.0, 2.0, 3.0, 7.5})
        EXPECT_NEAR(lp_norm(c, p), 0.5 * std::pow(measure, 1.0 / p), 1e-13);
    DistField f(g, -0.25);
    f(3, 17) = -4.0;
    EXPECT_EQ(lp_norm(f, infinity_norm), 4.0);
    EXPECT_THROW(lp_norm(f, 0.5), std::invalid_argument);
}

TEST(LpNorm, ReorderedSummation)
{
    const PhaseGrid g(32, 1.0, {40}, 2.0);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    DistField f(g);
    for (auto& v : f.values)
        v = n(rng);
    long double s = 0.0L;
    for (auto it = f.values.rbegin(); it != f.values.rend(); ++it)
        s += static_cast<long double>(*it) * *it;
    const double oracle = std::sqrt(static_cast<double>(s) * g.cell_volume());
    EXPECT_NEAR(lp_norm(f, 2.0) / oracle, 1.0, 1e-12);
}

TEST(LpNorm, TriangleInequality)
{
    const PhaseGrid g(16, 1.0, {16}, 1.0);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 20; ++trial) {
        DistField a(g), b(g), s(g);
        for (std::size_t k = 0; k < a.values.size(); ++k) {
            a.values[k] = n(rng);
            b.values[k] = n(rng);
            s.values[k] = a.values[k] + b.values[k];
        }
        for (double p : {1.0, 2.0, 3.0, infinity_norm})
            EXPECT_LE(lp_norm(s, p), lp_norm(a, p) + lp_norm(b, p) + 1e-12);
    }
}

TEST(MixedNorm, SeparableFactorizes)
{
    const PhaseGrid g(32, 2.0, {24}, 3.0);
    auto a = [](double x) { return 1.0 + 0.5 * std::sin(pi * x); };
    auto b = [](double xi) { return std::exp(-xi * xi); };
    const auto f = fill(g, [&](double x, const Momentum<2>& xi) { return a(x) * b(xi[0]); });
    std::vector<double> av(g.nx), bv(g.xi_size());
    for (std::size_t i = 0; i < g.nx; ++i)
        av[i] = a(g.x(i));
    for (std::size_t j = 0; j < g.xi_size(); ++j)
        bv[j] = b(g.momentum(j)[0]);
    const double p = 3.0, r = 1.5;
    EXPECT_NEAR(mixed_norm(f, p, r), lp_norm(av, g.dx(), r) * lp_norm(bv, g.dxi(0), p), 1e-13);
}

TEST(MixedNorm, ConstantAndEquivalence)
{
    const PhaseGrid g(8, 2.0, {6, 6}, 1.0);
    EXPECT_NEAR(mixed_norm(DistField(g, 2.0), 3.0, 2.0), 2.0 * std::sqrt(2.0) * std::cbrt(4.0), 1e-13);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    DistField f(g);
    for (auto& v : f.values)
        v = n(rng);
    EXPECT_NEAR(mixed_norm(f, 2.0, 2.0) / lp_norm(f, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(mixed_norm(f, 4.0, 4.0) / lp_norm(f, 4.0), 1.0, 1e-12);
}

TEST(Entropy, SquareIntegral)
{
    const PhaseGrid g(8, 2.0, {16, 16}, 2.0);
    EXPECT_EQ(entropy_integral(DistField(g), entropy_square()), 0.0);
    EXPECT_NEAR(entropy_integral(DistField(g, 1.0), entropy_square()), 2.0 * 16.0, 1e-12);
}

TEST(Entropy, GaussianMatchesRefinedQuadrature)
{
    const PhaseGrid g(4, 1.0, {64, 64}, 8.0);
    const auto f = fill(g, [](double, const Momentum<2>& xi) { return gaussian2(xi); });
    const double oracle = refined_quadrature(8.0, 640, [](const Momentum<2>& xi) { return gaussian2(xi) * gaussian2(xi); });
    EXPECT_NEAR(entropy_integral(f, entropy_square()) / oracle, 1.0, 1e-6);
}

TEST(Entropy, LogEntropyRejectsNegativeValues)
{
    const PhaseGrid g(2, 1.0, {4}, 1.0);
    DistField f(g, 0.5);
    EXPECT_GT(entropy_integral(f, entropy_log()), 0.0);
    f(1, 2) = -1e-3;
    EXPECT_THROW(entropy_integral(f, entropy_log()), std::domain_error);
}

TEST(Momentum, EvenFieldHasNone)
{
    const PhaseGrid g(4, 1.0, {32, 32}, 6.0);
    RVMState s(0.0, fill(g, [](double, const Momentum<2>& xi) { return gaussian2(xi); }), EMField(g.nx));
    const auto p = momentum_total(s);
    EXPECT_LE(std::abs(p[0]), 1e-14);
    EXPECT_LE(std::abs(p[1]), 1e-14);
}

TEST(Momentum, FieldMomentumIsExB)
{
    // E = (1, 0, 0), B = (0, 0, 1): E x B = (0, -1, 0).
    const PhaseGrid g(10, 2.5, {4, 4}, 1.0);
    RVMState s(0.0, DistField(g), EMField(g.nx));
    std::fill(s.em.ex.begin(), s.em.ex.end(), 1.0);
    std::fill(s.em.bz.begin(), s.em.bz.end(), 1.0);
    const auto p = momentum_total(s);
    EXPECT_NEAR(p[0], 0.0, 1e-15);
    EXPECT_NEAR(p[1], -2.5, 1e-14);
}

TEST(Momentum, DriftingGaussianMatchesRefinedQuadrature)
{
    const PhaseGrid g(3, 1.5, {64, 64}, 8.0);
    auto fn = [](const Momentum<2>& xi) { return gaussian2(xi, 1.5, 0.75); };
    RVMState s(0.0, fill(g, [&](double, const Momentum<2>& xi) { return fn(xi); }), EMField(g.nx));
    const double p1 = 1.5 * refined_quadrature(8.0, 640, [&](const Momentum<2>& xi) { return xi[0] * fn(xi); });
    const double p2 = 1.5 * refined_quadrature(8.0, 640, [&](const Momentum<2>& xi) { return xi[1] * fn(xi); });
    const auto p = momentum_total(s);
    EXPECT_NEAR(p[0] / p1, 1.0, 1e-6);
    EXPECT_NEAR(p[1] / p2, 1.0, 1e-6);
}

TEST(Quadrature, SecondOrderOnSmoothNonPeriodicIntegrand)
{
    // int_{-2}^{2} exp(0.3 xi) dxi: the midpoint rule is exactly second order here.
    const double exact = (std::exp(0.6) - std::exp(-0.6)) / 0.3;
    auto err = [&](std::size_t n) {
        const PhaseGrid g(1, 1.0, {n}, 2.0);
        const auto f = fill(g, [](double, const Momentum<2>& xi) { return std::exp(0.3 * xi[0]); });
        return std::abs(density(f)[0] - exact);
    };
    const double order = std::log2(err(32) / err(64));
    EXPECT_GE(order, 1.9);
}

TEST(Boundary, MonitorSeesOuterCells)
{
    const PhaseGrid g(4, 1.0, {8, 8}, 1.0);
    DistField f(g, 0.0);
    f(2, g.xi_index(3, 3)) = 5.0;
    EXPECT_EQ(xi_boundary_max(f), 0.0);
    f(1, g.xi_index(7, 3)) = -1e-9;
    EXPECT_EQ(xi_boundary_max(f), 1e-9);
}

TEST(Conservation, SampleCollectsAllFunctionals)
{
    const PhaseGrid g(4, 2.0, {8, 8}, 2.0);
    RVMState s(1.5, DistField(g, 0.25), EMField(g.nx));
    std::fill(s.em.ey.begin(), s.em.ey.end(), 2.0);
    const auto c = sample_conservation(s);
    EXPECT_EQ(c.t, 1.5);
    EXPECT_NEAR(c.mass, 0.25 * 2.0 * 16.0, 1e-13);
    EXPECT_NEAR(c.field, 0.5 * 4.0 * 2.0, 1e-14);
    EXPECT_NEAR(c.total, c.kinetic + c.field, 1e-13);
    EXPECT_EQ(c.linf, 0.25);
}
