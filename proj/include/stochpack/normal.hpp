#ifndef STOCHPACK_NORMAL_HPP
#define STOCHPACK_NORMAL_HPP

#include <cmath>
#include <stdexcept>

namespace stochpack {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kSqrt2Pi = 2.5066282746310002;

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / kSqrt2Pi;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

// Upper tail P(X > x); accurate for large positive x where 1 - cdf would cancel.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / kSqrt2);
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation followed by one Halley refinement against
/// the erfc-based CDF, giving absolute quantile error well below 1e-8 over
/// the full open interval (0, 1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("inverse_normal_cdf: p must lie in (0, 1)");
    }

    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step: e = CDF(x) - p, u = e / pdf(x).
    const double e = normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of a normal(loc, scale^2) truncated to [lo, hi].
inline Moments truncated_normal_moments(double loc, double scale, double lo, double hi) {
    if (!(scale > 0.0) || !(lo < hi)) {
        throw std::invalid_argument("truncated_normal_moments: need scale > 0 and lo < hi");
    }
    const double alpha = (lo - loc) / scale;
    const double beta = (hi - loc) / scale;

    // Difference of CDFs via the tail that avoids cancellation.
    double z;
    if (alpha + beta > 0.0) {
        z = normal_sf(alpha) - normal_sf(beta);
    } else {
        z = normal_cdf(beta) - normal_cdf(alpha);
    }
    if (!(z > 0.0)) {
        // Truncation interval carries no mass at double precision; the
        // distribution collapses to the nearer endpoint.
        const double point = (alpha > 0.0) ? lo : hi;
        return {point, 0.0};
    }

    const double pa = normal_pdf(alpha);
    const double pb = normal_pdf(beta);
    const double g = (pa - pb) / z;
    const double mean = loc + scale * g;
    const double h = (alpha * pa - beta * pb) / z;
    double variance = scale * scale * (1.0 + h - g * g);
    if (variance < 0.0) variance = 0.0;  // guard fp noise for near-degenerate intervals
    return {mean, variance};
}

}  // namespace stochpack

#endif
