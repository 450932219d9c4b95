#ifndef RVM_KINEMATICS_HPP
#define RVM_KINEMATICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

// Relativistic momentum/velocity algebra in dimensionless units (c = 1).
// Momenta have one or two components: the 1D1V electrostatic mode and the
// 1D2V mode with in-plane E = (Ex, Ey) and out-of-plane Bz.

namespace rvm {

template <std::size_t D>
using Momentum = std::array<double, D>;

template <std::size_t D>
using Velocity = std::array<double, D>;

template <std::size_t D>
using Matrix = std::array<std::array<double, D>, D>;

template <std::size_t D>
double norm_squared(const std::array<double, D>& a)
{
    double s = 0.0;
    for (double c : a)
        s += c * c;
    return s;
}

template <std::size_t D>
double dot(const std::array<double, D>& a, const std::array<double, D>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < D; ++i)
        s += a[i] * b[i];
    return s;
}

/// Lorentz factor sqrt(1 + |xi|^2).
template <std::size_t D>
double gamma(const Momentum<D>& xi)
{
    return std::sqrt(1.0 + norm_squared(xi));
}

/// v = xi / gamma(xi); |v| < 1 for every finite momentum.
template <std::size_t D>
Velocity<D> velocity(const Momentum<D>& xi)
{
    const double g = gamma(xi);
    Velocity<D> v{};
    for (std::size_t i = 0; i < D; ++i)
        v[i] = xi[i] / g;
    return v;
}

/// d v_i / d xi_j = delta_ij / gamma - xi_i xi_j / gamma^3 (symmetric).
template <std::size_t D>
Matrix<D> velocity_jacobian(const Momentum<D>& xi)
{
    const double g = gamma(xi);
    const double g3 = g * g * g;
    Matrix<D> jac{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j)
            jac[i][j] = (i == j ? 1.0 / g : 0.0) - xi[i] * xi[j] / g3;
    return jac;
}

/// Spectral norm of a symmetric matrix (largest |eigenvalue|).
inline double symmetric_operator_norm(const Matrix<1>& m) { return std::abs(m[0][0]); }

inline double symmetric_operator_norm(const Matrix<2>& m)
{
    const double mean = 0.5 * (m[0][0] + m[1][1]);
    const double half_diff = 0.5 * (m[0][0] - m[1][1]);
    const double radius = std::hypot(half_diff, m[0][1]);
    return std::max(std::abs(mean + radius), std::abs(mean - radius));
}

/// In-plane electric field and out-of-plane magnetic field at one point.
struct FieldValue {
    double ex = 0.0;
    double ey = 0.0;
    double bz = 0.0;
};

/// F = E + v x B with B = Bz e_z: (Ex + v_y Bz, Ey - v_x Bz).
inline std::array<double, 2> lorentz_force(const FieldValue& field, const Momentum<2>& xi)
{
    const auto v = velocity(xi);
    return {field.ex + v[1] * field.bz, field.ey - v[0] * field.bz};
}

/// Electrostatic 1D1V reduction: only Ex acts.
inline std::array<double, 1> lorentz_force(const FieldValue& field, const Momentum<1>&)
{
    return {field.ex};
}

} // namespace rvm

#endif
