#ifndef RVM_FFT_HPP
#define RVM_FFT_HPP

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>

namespace rvm {

namespace detail {

struct FftPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// The FFTW planner is not thread-safe; plans are created once per length under
// a lock and shared read-only afterwards (fftw_execute_dft_* is thread-safe).
inline const FftPlans& plans_for(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::size_t, FftPlans> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    auto* re = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* sp = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    FftPlans p;
    const int len = static_cast<int>(n);
    p.r2c = fftw_plan_dft_r2c_1d(len, re, sp, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_1d(len, sp, re, FFTW_ESTIMATE);
    fftw_free(re);
    fftw_free(sp);
    if (!p.r2c || !p.c2r)
        throw std::runtime_error("FFTW planning failed");
    return cache.emplace(n, p).first->second;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

} // namespace detail

/// Real-to-complex transform of one line of length n with its own aligned
/// buffers. Create one per thread and reuse it across lines.
class LineFft {
public:
    explicit LineFft(std::size_t n)
        : n_(n)
        , plans_(&detail::plans_for(n))
        , real_(static_cast<double*>(fftw_malloc(sizeof(double) * n)))
        , spec_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))))
    {
        if (n == 0)
            throw std::invalid_argument("LineFft: zero length");
    }

    std::size_t size() const { return n_; }
    std::size_t modes() const { return n_ / 2 + 1; }

    std::span<double> real() { return {real_.get(), n_}; }
    std::span<std::complex<double>> spectrum()
    {
        return {reinterpret_cast<std::complex<double>*>(spec_.get()), modes()};
    }

    void forward() { fftw_execute_dft_r2c(plans_->r2c, real_.get(), spec_.get()); }

    /// Inverse transform including the 1/n normalization.
    void inverse()
    {
        fftw_execute_dft_c2r(plans_->c2r, spec_.get(), real_.get());
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i)
            real_.get()[i] *= scale;
    }

    /// True for the unpaired Nyquist bin of an even-length transform.
    bool is_nyquist(std::size_t m) const { return n_ % 2 == 0 && m == n_ / 2; }

    /// Angular wavenumber of bin m on a period of length `period`.
    double wavenumber(std::size_t m, double period) const
    {
        return 2.0 * std::numbers::pi * static_cast<double>(m) / period;
    }

private:
    std::size_t n_;
    const detail::FftPlans* plans_;
    std::unique_ptr<double, detail::FftwDeleter> real_;
    std::unique_ptr<fftw_complex, detail::FftwDeleter> spec_;
};

/// Replaces the buffer content g(x) by g(x - shift) on a periodic line.
/// The Nyquist bin of even lengths is multiplied by cos(k shift) so the result
/// stays real.
inline void spectral_shift(LineFft& fft, double shift, double period)
{
    fft.forward();
    auto spec = fft.spectrum();
    // Phase factors by recurrence, re-anchored every 32 modes to bound drift.
    const double base = fft.wavenumber(1, period) * shift;
    const std::complex<double> step(std::cos(base), -std::sin(base));
    std::complex<double> w(1.0, 0.0);
    for (std::size_t m = 1; m < spec.size(); ++m) {
        if (m % 32 == 0) {
            const double phase = fft.wavenumber(m, period) * shift;
            w = {std::cos(phase), -std::sin(phase)};
        } else {
            w *= step;
        }
        if (fft.is_nyquist(m))
            spec[m] *= w.real();
        else
            spec[m] *= w;
    }
    fft.inverse();
}

/// Replaces the buffer content by its periodic derivative (Nyquist bin zeroed).
inline void spectral_derivative(LineFft& fft, double period)
{
    fft.forward();
    auto spec = fft.spectrum();
    spec[0] = 0.0;
    for (std::size_t m = 1; m < spec.size(); ++m) {
        if (fft.is_nyquist(m))
            spec[m] = 0.0;
        else
            spec[m] *= std::complex<double>(0.0, fft.wavenumber(m, period));
    }
    fft.inverse();
}

/// Zero-mean periodic antiderivative of the buffer plus `mean`; the Nyquist bin
/// and the mean of the input are discarded.
inline void spectral_antiderivative(LineFft& fft, double period, double mean = 0.0)
{
    fft.forward();
    auto spec = fft.spectrum();
    spec[0] = mean * static_cast<double>(fft.size());
    for (std::size_t m = 1; m < spec.size(); ++m) {
        if (fft.is_nyquist(m))
            spec[m] = 0.0;
        else
            spec[m] /= std::complex<double>(0.0, fft.wavenumber(m, period));
    }
    fft.inverse();
}

} // namespace rvm

#endif
