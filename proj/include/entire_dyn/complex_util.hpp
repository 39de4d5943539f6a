#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

namespace entire_dyn {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Magnitudes above this are treated as leaving machine range.
inline constexpr double overflow_threshold = 1e300;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Angle reduced to (-pi, pi].
inline double reduce_angle(double a)
{
    double r = std::remainder(a, two_pi);
    if (r <= -pi) {
        r += two_pi;
    }
    return r;
}

/// (cos a, sin a), exact at multiples of pi/2 (within 1e-12) so that points
/// on the axes keep a vanishing component.
inline std::pair<double, double> exact_cos_sin(double a)
{
    const double r = reduce_angle(a);
    const double quarter = r / (pi / 2);
    const double k = std::round(quarter);
    if (std::abs(quarter - k) < 1e-12) {
        switch ((static_cast<int>(k) % 4 + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    return {std::cos(r), std::sin(r)};
}

/// log(sin w) with the dominant exponential factored out when |Im w| > 30.
/// The imaginary part is returned unreduced so callers can judge how much
/// absolute phase accuracy is left.
inline Complex log_sin(Complex w)
{
    const double v = w.imag();
    if (std::abs(v) <= 30.0) {
        return std::log(std::sin(w));
    }
    if (v > 0.0) {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        const Complex q = std::exp(Complex(0.0, 2.0) * w);
        return Complex(v - std::numbers::ln2, pi / 2 - w.real()) + std::log(Complex(1.0, 0.0) - q);
    }
    const Complex l = log_sin(-w);
    return l + Complex(0.0, pi);
}

/// cot w, stable for large |Im w|.
inline Complex cot(Complex w)
{
    const double v = w.imag();
    const Complex i(0.0, 1.0);
    if (v > 30.0) {
        const Complex q = std::exp(2.0 * i * w);
        return i * (q + 1.0) / (q - 1.0);
    }
    if (v < -30.0) {
        const Complex p = std::exp(-2.0 * i * w);
        return i * (1.0 + p) / (1.0 - p);
    }
    return std::cos(w) / std::sin(w);
}

} // namespace entire_dyn
