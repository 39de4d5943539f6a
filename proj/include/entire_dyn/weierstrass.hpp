#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "complex_util.hpp"
#include "counter_rng.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

// Weierstraß sigma, zeta and wp for the lattice generated by 1 and tau
// (Im tau > 0), in the Ahlfors/Hurwitz normalization: eta1 = 2 zeta(1/2),
// eta2 = 2 zeta(tau/2).
//
// Evaluation reduces z to the period parallelogram centred at 0 and sums the
// lattice over rows n*tau + Z, each row summed in closed form (pi cot, pi^2 /
// sin^2, sin products). Rows converge like exp(-2 pi n Im tau).
namespace entire_dyn::weierstrass {

inline constexpr double eta1_tolerance = 1e-12;

/// 1/sin^2 w, via sin^2 w = -(1 - q)^2 / (4 q), q = e^{2iw}, on the half
/// plane Im w >= 0 (sin^2 is even).
inline Complex inv_sin_sq(Complex w)
{
    if (w.imag() < 0.0) {
        w = -w;
    }
    const Complex q = std::exp(Complex(0.0, 2.0) * w);
    const Complex one_minus_q = 1.0 - q;
    return -4.0 * q / (one_minus_q * one_minus_q);
}

struct Eta1Series {
    Complex value;
    double tail_bound = 0.0;
    int terms = 0;
};

/// Bound on 2 pi^2 sum_{n > terms} |1/sin^2(n pi tau)|.
inline double eta1_tail_bound(double im_tau, int terms)
{
    const double q = std::exp(-two_pi * im_tau);
    const double qn1 = std::pow(q, terms + 1);
    return 2.0 * pi * pi * 4.0 * qn1 / ((1.0 - qn1) * (1.0 - qn1) * (1.0 - q));
}

/// Number of series terms whose tail bound is below `tol`.
inline int eta1_terms_needed(double im_tau, double tol = 1e-13)
{
    const double q = std::exp(-two_pi * im_tau);
    const double n = std::log(tol * (1.0 - q) / (8.0 * pi * pi * 2.0)) / std::log(q);
    if (!std::isfinite(n) || n > 1e8) {
        return std::numeric_limits<int>::max();
    }
    int terms = std::max(5, static_cast<int>(std::ceil(n)) + 1);
    while (eta1_tail_bound(im_tau, terms) > tol) {
        ++terms;
    }
    return terms;
}

/// Partial sum of eta1 = pi^2 (1/3 + 2 sum_{n>=1} 1/sin^2(n pi tau)).
/// Throws ConvergenceError when the tail bound exceeds 1e-12.
inline Eta1Series eta1_series(Complex tau, int n_terms)
{
    if (!(tau.imag() > 0.0)) {
        throw PreconditionError("eta1: Im tau must be positive");
    }
    if (n_terms < 5) {
        throw PreconditionError("eta1: need at least 5 terms");
    }
    const Complex q = std::exp(Complex(0.0, two_pi) * tau);
    Complex qn(1.0, 0.0);
    Complex sum(0.0, 0.0);
    for (int n = 1; n <= n_terms; ++n) {
        qn *= q;
        const Complex d = 1.0 - qn;
        sum += -4.0 * qn / (d * d);
        if (std::abs(qn) < 1e-300) {
            break;
        }
    }
    Eta1Series out;
    out.value = pi * pi * (1.0 / 3.0 + 2.0 * sum);
    out.tail_bound = eta1_tail_bound(tau.imag(), n_terms);
    out.terms = n_terms;
    if (out.tail_bound > eta1_tolerance) {
        throw ConvergenceError("eta1: series tail bound exceeds 1e-12; increase n_terms");
    }
    return out;
}

inline Complex eta1(Complex tau, int n_terms) { return eta1_series(tau, n_terms).value; }

/// eta1 with the term count chosen from the tail bound.
inline Complex eta1(Complex tau)
{
    if (!(tau.imag() > 0.0)) {
        throw PreconditionError("eta1: Im tau must be positive");
    }
    const int needed = eta1_terms_needed(tau.imag());
    if (needed > 2'000'000) {
        throw ConvergenceError("eta1: Im tau too small for the q-series");
    }
    return eta1_series(tau, needed).value;
}

/// Leading asymptotic pi^2/3 (1 - 24 e^{2 pi i tau}), nome reading.
inline Complex eta1_asymptotic_nome(Complex tau)
{
    return pi * pi / 3.0 * (1.0 - 24.0 * std::exp(Complex(0.0, two_pi) * tau));
}

/// Leading asymptotic with the exponent read literally as e^{-2 pi tau}.
inline Complex eta1_asymptotic_literal(Complex tau)
{
    return pi * pi / 3.0 * (1.0 - 24.0 * std::exp(-two_pi * tau));
}

/// sigma(z) as log sigma(z): real part log|sigma|, imaginary part an
/// unreduced phase. Zeros of sigma are flagged and carry log_value -inf.
struct SigmaValue {
    Complex log_value;
    bool zero = false;

    double log_abs() const { return zero ? -std::numeric_limits<double>::infinity() : log_value.real(); }

    /// sigma(z) itself; infinite components when |sigma| leaves double range.
    Complex value() const
    {
        if (zero) {
            return {0.0, 0.0};
        }
        if (log_value.real() > std::log(overflow_threshold)) {
            const double inf = std::numeric_limits<double>::infinity();
            return {inf, inf};
        }
        return std::exp(log_value);
    }
};

struct ReducedPoint {
    Complex z;      // z - m - n tau
    long long m = 0;
    long long n = 0;
};

/// Membership of a point in the exceptional sets around lattice points and
/// near the critical directions.
struct ExclusionFlags {
    bool in_E = false;
    bool in_F = false;
    bool in_G = false;
};

class LatticeContext {
public:
    explicit LatticeContext(Complex tau) : tau_(tau)
    {
        if (!(tau.imag() > 0.0) || !is_finite(tau)) {
            throw PreconditionError("LatticeContext: Im tau must be positive");
        }
        eta1_ = weierstrass::eta1(tau);
        eta2_ = eta1_ * tau_ - Complex(0.0, two_pi);
        b_ = pi / tau_.imag();
        a_ = std::abs(eta1_ - b_);
        alpha_ = (a_ > 1e-14 * b_) ? std::arg(eta1_ - b_) : 0.0;

        // Independent route to eta2: twice the row sum of zeta at tau/2.
        const Complex eta2_direct = 2.0 * zeta_reduced(0.5 * tau_);
        legendre_residual_ = std::abs(eta1_ * tau_ - eta2_direct - Complex(0.0, two_pi));
        if (!(legendre_residual_ < 1e-10)) {
            throw ConvergenceError("LatticeContext: Legendre relation residual above 1e-10");
        }
    }

    Complex tau() const { return tau_; }
    Complex eta1() const { return eta1_; }
    Complex eta2() const { return eta2_; }
    /// pi / Im tau.
    double B() const { return b_; }
    /// |eta1 - B|.
    double A() const { return a_; }
    /// Phase of eta1 - B in (-pi, pi]; 0 when A vanishes.
    double alpha_phase() const { return alpha_; }
    double legendre_residual() const { return legendre_residual_; }

    Complex lattice_point(long long m, long long n) const
    {
        return static_cast<double>(m) + static_cast<double>(n) * tau_;
    }

    ReducedPoint reduce(Complex z) const
    {
        const double nb = std::round(z.imag() / tau_.imag());
        const Complex t = z - nb * tau_;
        const double ma = std::round(t.real());
        return {t - ma, static_cast<long long>(ma), static_cast<long long>(nb)};
    }

    /// Row sum for zeta on the reduced cell; no argument reduction.
    Complex zeta_reduced(Complex z) const
    {
        Complex acc = eta1_ * z + pi * cot(pi * z);
        Complex rows(0.0);
        for (int n = 1; n < max_rows; ++n) {
            const Complex shift = static_cast<double>(n) * tau_;
            const Complex term = cot(pi * (z + shift)) + cot(pi * (z - shift));
            rows += term;
            if (std::abs(term) < 1e-18 * (1.0 + std::abs(rows)) && n >= 2) {
                break;
            }
        }
        return acc + pi * rows;
    }

    Complex wp_reduced(Complex z) const
    {
        Complex rows(0.0);
        for (int n = 1; n < max_rows; ++n) {
            const Complex shift = static_cast<double>(n) * tau_;
            const Complex term = inv_sin_sq(pi * (z + shift)) + inv_sin_sq(pi * (z - shift));
            rows += term;
            if (std::abs(term) < 1e-18 * (1.0 + std::abs(rows)) && n >= 2) {
                break;
            }
        }
        return -eta1_ + pi * pi * (inv_sin_sq(pi * z) + rows);
    }

    /// log sigma on the reduced cell:
    /// sigma(z) = (1/pi) e^{eta1 z^2/2} sin(pi z) prod_n (1 - sin^2(pi z)/sin^2(n pi tau)).
    Complex log_sigma_reduced(Complex z) const
    {
        const Complex s = std::sin(pi * z);
        const Complex s2 = s * s;
        Complex acc = -std::log(pi) + 0.5 * eta1_ * z * z + std::log(s);
        for (int n = 1; n < max_rows; ++n) {
            const Complex x = s2 * inv_sin_sq(pi * static_cast<double>(n) * tau_);
            acc += std::log(1.0 - x);
            if (std::abs(x) < 1e-18 && n >= 2) {
                break;
            }
        }
        return acc;
    }

    static constexpr int max_rows = 200000;

private:
    Complex tau_;
    Complex eta1_;
    Complex eta2_;
    double b_ = 0.0;
    double a_ = 0.0;
    double alpha_ = 0.0;
    double legendre_residual_ = 0.0;
};

inline constexpr double pole_tolerance = 1e-8;
inline constexpr double zero_tolerance = 1e-14;

/// sigma(z) with the quasi-periodic factors of the reduction accumulated in
/// the log channel: sigma(z + w) = eps(w) e^{eta(w)(z + w/2)} sigma(z) for
/// w = m + n tau, eta(w) = m eta1 + n eta2, eps(w) = +1 iff m and n are even.
inline SigmaValue sigma(const LatticeContext& ctx, Complex z)
{
    const ReducedPoint r = ctx.reduce(z);
    if (std::abs(r.z) < zero_tolerance) {
        return {Complex(-std::numeric_limits<double>::infinity(), 0.0), true};
    }
    const Complex w = ctx.lattice_point(r.m, r.n);
    const Complex eta_w = static_cast<double>(r.m) * ctx.eta1() + static_cast<double>(r.n) * ctx.eta2();
    Complex log_value = ctx.log_sigma_reduced(r.z) + eta_w * (r.z + 0.5 * w);
    const bool both_even = (r.m % 2 == 0) && (r.n % 2 == 0);
    if (!both_even) {
        log_value += Complex(0.0, pi);
    }
    return {log_value, false};
}

inline Complex zeta(const LatticeContext& ctx, Complex z)
{
    const ReducedPoint r = ctx.reduce(z);
    if (std::abs(r.z) < pole_tolerance) {
        throw PoleError("zeta: argument within 1e-8 of a lattice point");
    }
    return ctx.zeta_reduced(r.z) + static_cast<double>(r.m) * ctx.eta1() + static_cast<double>(r.n) * ctx.eta2();
}

inline Complex wp(const LatticeContext& ctx, Complex z)
{
    const ReducedPoint r = ctx.reduce(z);
    if (std::abs(r.z) < pole_tolerance) {
        throw PoleError("wp: argument within 1e-8 of a lattice point");
    }
    return ctx.wp_reduced(r.z);
}

/// Re(1/eta1) >= Im tau / (2 pi).
inline bool condition_8c(const LatticeContext& ctx)
{
    if (ctx.eta1() == Complex(0.0)) {
        throw PreconditionError("condition_8c: eta1 vanishes");
    }
    return (1.0 / ctx.eta1()).real() >= ctx.tau().imag() / two_pi;
}

/// |eta1 - pi/Im tau| <= pi/Im tau, algebraically equivalent to condition_8c.
inline bool condition_8c_disk_form(const LatticeContext& ctx) { return ctx.A() <= ctx.B(); }

/// V(z) = pi/(2 Im tau)|z|^2 + Re((eta1/2 - pi/(2 Im tau)) z^2).
inline double V_cartesian(const LatticeContext& ctx, Complex z)
{
    const double b_half = 0.5 * ctx.B();
    return b_half * std::norm(z) + ((0.5 * ctx.eta1() - b_half) * z * z).real();
}

/// V(r e^{i theta}) = (B + A cos(alpha + 2 theta)) r^2 / 2.
inline double V_polar(const LatticeContext& ctx, double r, double theta)
{
    return 0.5 * (ctx.B() + ctx.A() * std::cos(ctx.alpha_phase() + 2.0 * theta)) * r * r;
}

/// V(z), computed both ways; throws if the forms disagree beyond 1e-10 relative.
inline double V_of_z(const LatticeContext& ctx, Complex z)
{
    const double v1 = V_cartesian(ctx, z);
    const double v2 = V_polar(ctx, std::abs(z), std::arg(z));
    const double scale = ctx.B() * std::norm(z);
    if (std::abs(v1 - v2) > 1e-10 * scale + 1e-300) {
        throw NumericalError("V_of_z: Cartesian and polar forms disagree");
    }
    return v1;
}

/// Critical directions theta^{+-} = (+-pi - alpha)/2.
inline std::pair<double, double> critical_angles(const LatticeContext& ctx)
{
    return {(pi - ctx.alpha_phase()) / 2.0, (-pi - ctx.alpha_phase()) / 2.0};
}

/// E: disks D(w, e^{-|w|}); F: disks D(w, |w|^{-1/2}) (radius 1 at w = 0);
/// G: |theta - theta^{+-}| <= r^{-1/4}. Requires |z| >= 1 for G.
inline ExclusionFlags exclusion_membership(const LatticeContext& ctx, Complex z)
{
    const double r = std::abs(z);
    if (!(r >= 1.0)) {
        throw PreconditionError("exclusion_membership: |z| >= 1 required");
    }
    ExclusionFlags flags;
    const Complex tau = ctx.tau();
    const double nb = z.imag() / tau.imag();
    // Every disk has radius <= 1, so rows beyond 1/Im tau cannot reach z.
    const long long span = static_cast<long long>(std::ceil(1.0 / tau.imag())) + 1;
    const long long n0 = static_cast<long long>(std::floor(nb));
    for (long long n = n0 - span; n <= n0 + span + 1; ++n) {
        const Complex t = z - static_cast<double>(n) * tau;
        const long long mc = static_cast<long long>(std::round(t.real()));
        for (long long m = mc - 1; m <= mc + 1; ++m) {
            const Complex w = ctx.lattice_point(m, n);
            const double d = std::abs(z - w);
            const double wabs = std::abs(w);
            if (d < std::exp(-wabs)) {
                flags.in_E = true;
            }
            const double f_radius = wabs > 1.0 ? 1.0 / std::sqrt(wabs) : 1.0;
            if (d < f_radius) {
                flags.in_F = true;
            }
        }
    }
    const auto [theta_plus, theta_minus] = critical_angles(ctx);
    const double theta = std::arg(z);
    const double width = std::pow(r, -0.25);
    flags.in_G = std::abs(reduce_angle(theta - theta_plus)) <= width
        || std::abs(reduce_angle(theta - theta_minus)) <= width;
    return flags;
}

struct Theorem7Report {
    double c1 = std::numeric_limits<double>::infinity(); // min log|sigma| / |z|^{3/2} off E u G
    double c2 = std::numeric_limits<double>::infinity(); // min |z zeta(z)| / |z|^{3/2} off F u G
    std::uint64_t used_for_c1 = 0;
    std::uint64_t used_for_c2 = 0;
    std::uint64_t samples = 0;

    bool both_positive() const { return c1 > 0.0 && c2 > 0.0 && used_for_c1 > 0 && used_for_c2 > 0; }
};

/// Samples uniformly in (log r, theta) over r_lo <= |z| <= r_hi and records the
/// smallest normalized values of log|sigma| and |z zeta(z)|.
inline Theorem7Report verify_theorem7_bounds(const LatticeContext& ctx, double r_lo, double r_hi,
                                             std::uint64_t samples, std::uint64_t seed = 1,
                                             Parallelism par = {})
{
    if (!condition_8c(ctx)) {
        throw PreconditionError("verify_theorem7_bounds: the eta1 disk condition fails for this tau");
    }
    if (!(r_lo >= 10.0) || !(r_hi <= 1000.0) || !(r_lo < r_hi)) {
        throw PreconditionError("verify_theorem7_bounds: need 10 <= r_lo < r_hi <= 1000");
    }
    struct Sample {
        double c1 = std::numeric_limits<double>::infinity();
        double c2 = std::numeric_limits<double>::infinity();
    };
    std::vector<Sample> values(samples);
    const double log_lo = std::log(r_lo);
    const double log_span = std::log(r_hi) - log_lo;
    parallel_for(samples, par, [&](std::size_t i) {
        const double r = std::exp(log_lo + log_span * counter_uniform(seed, i, 0));
        const double theta = two_pi * counter_uniform(seed, i, 1) - pi;
        const Complex z = std::polar(r, theta);
        const ExclusionFlags fl = exclusion_membership(ctx, z);
        const double norm = std::pow(r, 1.5);
        if (!fl.in_E && !fl.in_G) {
            values[i].c1 = sigma(ctx, z).log_abs() / norm;
        }
        if (!fl.in_F && !fl.in_G) {
            values[i].c2 = std::abs(z * zeta(ctx, z)) / norm;
        }
    });
    Theorem7Report rep;
    rep.samples = samples;
    for (const Sample& s : values) {
        if (std::isfinite(s.c1)) {
            rep.c1 = std::min(rep.c1, s.c1);
            ++rep.used_for_c1;
        }
        if (std::isfinite(s.c2)) {
            rep.c2 = std::min(rep.c2, s.c2);
            ++rep.used_for_c2;
        }
    }
    return rep;
}

enum class RegionCell : std::uint8_t { outside = 0, inside = 1, unknown = 2 };

/// Row-major grid of the eta1 disk condition over a tau window, top row first, pixel
/// centres at cell midpoints.
struct RegionRaster {
    int width = 0;
    int height = 0;
    WindowSpec window;
    std::vector<RegionCell> cells;

    RegionCell at(int col, int row) const { return cells[static_cast<std::size_t>(row) * width + col]; }
    Complex tau_at(int col, int row) const
    {
        const double x = window.x_min + (col + 0.5) * (window.x_max - window.x_min) / width;
        const double y = window.y_max - (row + 0.5) * (window.y_max - window.y_min) / height;
        return {x, y};
    }
};

inline constexpr int raster_max_terms = 200000;

inline RegionRaster region_raster(const WindowSpec& window, int resolution, Parallelism par = {})
{
    if (!(window.y_min >= 0.0)) {
        throw PreconditionError("region_raster: window must lie in the upper half plane");
    }
    if (resolution < 1 || resolution > 16384) {
        throw PreconditionError("region_raster: resolution out of range");
    }
    RegionRaster out;
    out.width = resolution;
    out.height = resolution;
    out.window = window;
    out.cells.assign(static_cast<std::size_t>(resolution) * resolution, RegionCell::unknown);
    parallel_for(static_cast<std::size_t>(resolution), par, [&](std::size_t row) {
        for (int col = 0; col < resolution; ++col) {
            const Complex tau = out.tau_at(col, static_cast<int>(row));
            RegionCell cell = RegionCell::unknown;
            const int needed = tau.imag() > 0.0 ? eta1_terms_needed(tau.imag()) : raster_max_terms + 1;
            if (needed <= raster_max_terms) {
                try {
                    const Complex e = eta1_series(tau, needed).value;
                    if (e != Complex(0.0)) {
                        cell = (1.0 / e).real() >= tau.imag() / two_pi ? RegionCell::inside : RegionCell::outside;
                    }
                } catch (const ConvergenceError&) {
                    cell = RegionCell::unknown;
                }
            }
            out.cells[row * static_cast<std::size_t>(resolution) + col] = cell;
        }
    });
    return out;
}

/// Re(1/eta1(iy)) - y/(2 pi): positive inside the disk-condition region on the imaginary axis.
inline double imaginary_axis_margin(double y)
{
    return (1.0 / weierstrass::eta1(Complex(0.0, y))).real() - y / two_pi;
}

/// Bracket [lo, hi] of width <= tol around the sign change of
/// imaginary_axis_margin, starting from a bracket with margin(lo) > 0 >= margin(hi).
inline std::pair<double, double> imaginary_axis_boundary(double lo, double hi, double tol = 1e-12)
{
    if (!(0.0 < lo && lo < hi) || !(imaginary_axis_margin(lo) > 0.0) || imaginary_axis_margin(hi) > 0.0) {
        throw RootFindingError("imaginary_axis_boundary: no sign change in the initial bracket");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (imaginary_axis_margin(mid) > 0.0 ? lo : hi) = mid;
    }
    return {lo, hi};
}

} // namespace entire_dyn::weierstrass
