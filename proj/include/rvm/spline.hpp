#ifndef RVM_SPLINE_HPP
#define RVM_SPLINE_HPP

#include "rvm/fft.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

// Uniform cubic B-spline interpolation. Positions are given in index units
// (node j sits at position j).

namespace rvm::spline {

inline double bspline3(double t)
{
    const double a = std::abs(t);
    if (a < 1.0)
        return (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0;
    if (a < 2.0) {
        const double b = 2.0 - a;
        return b * b * b / 6.0;
    }
    return 0.0;
}

/// In-place interpolation coefficients for data that is zero outside the
/// line: solves (c[j-1] + 4 c[j] + c[j+1]) / 6 = f[j] with c[-1] = c[n] = 0.
inline void coefficients_zero_extended(std::span<double> data, std::vector<double>& scratch)
{
    const std::size_t n = data.size();
    if (n == 0)
        return;
    scratch.resize(n);
    // Thomas algorithm on the constant (1, 4, 1) / 6 system.
    const double off = 1.0 / 6.0;
    const double diag = 4.0 / 6.0;
    scratch[0] = off / diag;
    data[0] /= diag;
    for (std::size_t j = 1; j < n; ++j) {
        const double denom = diag - off * scratch[j - 1];
        scratch[j] = off / denom;
        data[j] = (data[j] - off * data[j - 1]) / denom;
    }
    for (std::size_t j = n - 1; j-- > 0;)
        data[j] -= scratch[j] * data[j + 1];
}

/// Evaluates the zero-extended spline with coefficients `c` at position y.
inline double eval_zero_extended(std::span<const double> c, double y)
{
    const auto n = static_cast<long>(c.size());
    const long m0 = static_cast<long>(std::floor(y));
    double s = 0.0;
    for (long m = m0 - 1; m <= m0 + 2; ++m)
        if (m >= 0 && m < n)
            s += c[static_cast<std::size_t>(m)] * bspline3(y - static_cast<double>(m));
    return s;
}

/// Shifts a zero-extended line: out[j] = S(j - shift_cells).
inline void shift_zero_extended(std::span<double> line, double shift_cells, std::vector<double>& coeff,
                                std::vector<double>& scratch)
{
    coeff.assign(line.begin(), line.end());
    coefficients_zero_extended(coeff, scratch);
    for (std::size_t j = 0; j < line.size(); ++j)
        line[j] = eval_zero_extended(coeff, static_cast<double>(j) - shift_cells);
}

/// Shifts a periodic line held in the FFT buffer: buffer[j] <- S(j - shift_cells).
/// Coefficients come from dividing by the B-spline symbol in Fourier space.
inline void shift_periodic(LineFft& fft, double shift_cells, std::vector<double>& coeff)
{
    const std::size_t n = fft.size();
    fft.forward();
    auto spec = fft.spectrum();
    for (std::size_t m = 0; m < spec.size(); ++m) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        spec[m] /= (4.0 + 2.0 * std::cos(theta)) / 6.0;
    }
    fft.inverse();
    auto re = fft.real();
    coeff.assign(re.begin(), re.end());
    const auto nl = static_cast<long>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double y = static_cast<double>(j) - shift_cells;
        const long m0 = static_cast<long>(std::floor(y));
        double s = 0.0;
        for (long m = m0 - 1; m <= m0 + 2; ++m) {
            const long w = ((m % nl) + nl) % nl;
            s += coeff[static_cast<std::size_t>(w)] * bspline3(y - static_cast<double>(m));
        }
        re[j] = s;
    }
}

/// Tensor-product zero-extended spline on an n1 x n2 row-major array.
class ZeroExtendedSpline2D {
public:
    ZeroExtendedSpline2D(std::size_t n1, std::size_t n2)
        : n1_(n1)
        , n2_(n2)
        , coeff_(n1 * n2)
        , column_(n1)
    {}

    void fit(std::span<const double> data)
    {
        coeff_.assign(data.begin(), data.end());
        for (std::size_t i = 0; i < n1_; ++i)
            coefficients_zero_extended(std::span<double>(coeff_.data() + i * n2_, n2_), scratch_);
        for (std::size_t j = 0; j < n2_; ++j) {
            for (std::size_t i = 0; i < n1_; ++i)
                column_[i] = coeff_[i * n2_ + j];
            coefficients_zero_extended(column_, scratch_);
            for (std::size_t i = 0; i < n1_; ++i)
                coeff_[i * n2_ + j] = column_[i];
        }
    }

    double operator()(double y1, double y2) const
    {
        const long a0 = static_cast<long>(std::floor(y1));
        const long b0 = static_cast<long>(std::floor(y2));
        const auto n1 = static_cast<long>(n1_);
        const auto n2 = static_cast<long>(n2_);
        double wa[4], wb[4];
        for (int i = 0; i < 4; ++i) {
            wa[i] = bspline3(y1 - static_cast<double>(a0 - 1 + i));
            wb[i] = bspline3(y2 - static_cast<double>(b0 - 1 + i));
        }
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            const long a = a0 - 1 + i;
            if (a < 0 || a >= n1)
                continue;
            const double* row = coeff_.data() + a * n2;
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                const long b = b0 - 1 + k;
                if (b >= 0 && b < n2)
                    acc += row[b] * wb[k];
            }
            s += wa[i] * acc;
        }
        return s;
    }

private:
    std::size_t n1_;
    std::size_t n2_;
    std::vector<double> coeff_;
    std::vector<double> column_;
    std::vector<double> scratch_;
};

} // namespace rvm::spline

#endif
