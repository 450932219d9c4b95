#ifndef RVM_FIT_HPP
#define RVM_FIT_HPP

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvm {

/// Ordinary least squares of log y against log x.
struct LogLogFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    /// 95% confidence half-width of the slope (Student t, n - 2 dof).
    double ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 0;
    /// log10(max x / min x)
    double decades = 0.0;
    /// Set when fewer than 4 points or less than one decade; the numbers are
    /// still reported when computable.
    bool flagged = true;
    std::string note;

    bool valid() const { return !flagged && std::isfinite(slope); }
};

inline constexpr std::size_t min_fit_points = 4;

inline LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog: size mismatch");
    LogLogFit fit;
    fit.points = x.size();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
            fit.note = "nonpositive or non-finite values";
            return fit;
        }
    if (x.size() < 2) {
        fit.note = "insufficient range";
        return fit;
    }
    std::vector<double> lx(x.size()), ly(y.size());
    double xmin = x[0], xmax = x[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
    }
    fit.decades = std::log10(xmax / xmin);
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        fit.note = "degenerate abscissae";
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
        sse += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (x.size() > 2) {
        const double se = std::sqrt(sse / (n - 2.0) / sxx);
        const boost::math::students_t dist(n - 2.0);
        fit.ci_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
    }
    fit.flagged = x.size() < min_fit_points || fit.decades < 1.0 - 1e-9;
    if (fit.flagged)
        fit.note = "insufficient range";
    return fit;
}

} // namespace rvm

#endif
