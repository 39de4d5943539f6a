#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "area.hpp"
#include "complex_util.hpp"
#include "errors.hpp"
#include "ext_real.hpp"
#include "polynomial.hpp"

namespace entire_dyn::poincare {

/// Truncated Taylor expansion at 0 with the radius r0 up to which the
/// truncation tail is negligible (see schroeder_series).
class PowerSeries {
public:
    PowerSeries() = default;
    PowerSeries(std::vector<Complex> coeffs, double radius) : coeffs_(std::move(coeffs)), radius_(radius)
    {
        if (coeffs_.size() < 2) {
            throw PreconditionError("PowerSeries: need at least two coefficients");
        }
        if (!(radius_ > 0.0)) {
            throw PreconditionError("PowerSeries: radius estimate must be positive");
        }
    }

    std::span<const Complex> coefficients() const { return coeffs_; }
    int truncation() const { return static_cast<int>(coeffs_.size()) - 1; }
    double radius() const { return radius_; }

    Complex operator()(Complex u) const
    {
        Complex acc = coeffs_.back();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            acc = acc * u + coeffs_[k];
        }
        return acc;
    }

    std::pair<Complex, Complex> value_and_derivative(Complex u) const
    {
        Complex value = coeffs_.back();
        Complex deriv(0.0);
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            deriv = deriv * u + value;
            value = value * u + coeffs_[k];
        }
        return {value, deriv};
    }

    /// sum_k |c_k| r^k, the scale against which rounding and truncation are judged.
    double majorant(double r) const
    {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;) {
            acc = acc * r + std::abs(coeffs_[k]);
        }
        return acc;
    }

    friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

private:
    std::vector<Complex> coeffs_;
    double radius_ = 1.0;
};

struct FixedPoint {
    Complex z0;
    Complex multiplier;
};

/// All fixed points of p (roots of p(z) - z from the companion matrix, Newton
/// polished) whose multiplier satisfies |p'(z0)| > 1 + 1e-9.
inline std::vector<FixedPoint> find_repelling_fixed_points(const PolynomialSpec& spec)
{
    const Polynomial& p = spec.poly();
    std::vector<Complex> c(p.coefficients().begin(), p.coefficients().end());
    c[1] -= 1.0;
    const Polynomial q(c);
    const std::size_t d = q.degree();
    const Complex lead = q.leading();

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 1; i < d; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    for (std::size_t i = 0; i < d; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -c[i] / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw RootFindingError("find_repelling_fixed_points: eigenvalue solver failed");
    }

    std::vector<FixedPoint> out;
    const Polynomial dq = q.derivative();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        Complex z = solver.eigenvalues()[i];
        for (int it = 0; it < 60; ++it) {
            const auto [v, dv] = q.value_and_derivative(z);
            if (std::abs(dv) < 1e-300) {
                break;
            }
            const Complex step = v / dv;
            z -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) {
                break;
            }
        }
        double scale = 0.0;
        double zk = 1.0;
        for (const Complex& ck : c) {
            scale += std::abs(ck) * zk;
            zk *= std::abs(z);
        }
        if (!(std::abs(q(z)) <= 1e-13 * std::max(1.0, scale))) {
            throw RootFindingError("find_repelling_fixed_points: Newton polish did not reach 1e-13 residual");
        }
        const Complex lambda = p.derivative()(z);
        if (std::abs(lambda) > 1.0 + 1e-9) {
            out.push_back({z, lambda});
        }
    }
    (void)dq;
    std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) {
        if (a.z0.real() != b.z0.real()) {
            return a.z0.real() < b.z0.real();
        }
        return a.z0.imag() < b.z0.imag();
    });
    return out;
}

inline constexpr double series_tail_ratio = 1e-14;
inline constexpr double schroeder_residual_tolerance = 1e-10;

namespace detail {

// Largest r with max_{last 16 n} |c_n| r^n <= 1e-14 * max_k |c_k| r^k.
inline double tail_radius(const std::vector<Complex>& c)
{
    const int n_max = static_cast<int>(c.size()) - 1;
    const int first_tail = std::max(2, n_max - 15);
    const auto ok = [&](double log_r) {
        double head = -std::numeric_limits<double>::infinity();
        double tail = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= n_max; ++k) {
            const double a = std::abs(c[static_cast<std::size_t>(k)]);
            if (a == 0.0) {
                continue;
            }
            const double l = std::log(a) + k * log_r;
            head = std::max(head, l);
            if (k >= first_tail) {
                tail = std::max(tail, l);
            }
        }
        return tail <= std::log(series_tail_ratio) + head;
    };
    double lo = std::log(1e-8);
    double hi = std::log(1e8);
    if (ok(hi)) {
        return std::exp(hi);
    }
    if (!ok(lo)) {
        return std::exp(lo);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return std::exp(lo);
}

} // namespace detail

/// Solves f(lambda z) = p(f(z)) with f(0) = z0, f'(0) = 1 by matching Taylor
/// coefficients: c_n (lambda^n - lambda) = [z^n] sum_{j>=2} e_j h(z)^j, where
/// e_j are the Taylor coefficients of p at z0 and h = f - z0 truncated below
/// degree n. Verifies the functional equation on |z| = r0/|lambda|.
inline PowerSeries schroeder_series(const PolynomialSpec& spec, Complex z0, Complex lambda, int n_terms)
{
    if (n_terms < 2 || n_terms > 200) {
        throw PreconditionError("schroeder_series: need 2 <= N <= 200");
    }
    if (!(std::abs(lambda) > 1.0)) {
        throw PreconditionError("schroeder_series: fixed point must be repelling");
    }
    const Polynomial& p = spec.poly();
    const std::vector<Complex> e = p.taylor_at(z0);
    const double scale = 1e-9 * (1.0 + std::abs(z0)) * std::max(1.0, p.max_abs_coefficient());
    if (std::abs(e[0] - z0) > scale || std::abs(e[1] - lambda) > 1e-9 * (1.0 + std::abs(lambda)) * std::max(1.0, p.max_abs_coefficient())) {
        throw PreconditionError("schroeder_series: (z0, lambda) is not a fixed point with that multiplier");
    }
    const std::size_t d = spec.degree();
    const std::size_t n_max = static_cast<std::size_t>(n_terms);

    std::vector<Complex> c(n_max + 1, Complex(0.0));
    c[0] = z0;
    c[1] = 1.0;
    // powers[j][m] = [z^m] h^j for j = 1..d.
    std::vector<std::vector<Complex>> powers(d + 1, std::vector<Complex>(n_max + 1, Complex(0.0)));
    powers[1][1] = 1.0;
    for (std::size_t j = 2; j <= d; ++j) {
        powers[j][j] = 1.0; // h^j = z^j + ...
    }
    Complex lambda_n = lambda;
    for (std::size_t n = 2; n <= n_max; ++n) {
        lambda_n *= lambda;
        Complex rhs(0.0);
        for (std::size_t j = 2; j <= d; ++j) {
            Complex s(0.0);
            for (std::size_t k = 1; k + 1 <= n; ++k) {
                s += c[k] * powers[j - 1][n - k];
            }
            powers[j][n] = s;
            rhs += e[j] * s;
        }
        c[n] = rhs / (lambda_n - lambda);
        powers[1][n] = c[n];
    }

    PowerSeries series(c, detail::tail_radius(c));

    const double r = series.radius() / std::abs(lambda);
    const double norm = std::max(1.0, series.majorant(series.radius()));
    constexpr int probes = 64;
    for (int k = 0; k < probes; ++k) {
        const Complex z = std::polar(r, two_pi * k / probes);
        const double res = std::abs(series(lambda * z) - p(series(z)));
        if (!(res <= schroeder_residual_tolerance * norm)) {
            throw ResidualError("schroeder_series: functional equation residual above 1e-10");
        }
    }
    return series;
}

/// Validated Poincaré function data: p, a repelling fixed point, its
/// multiplier and the Schröder series.
struct PoincareFunction {
    PolynomialSpec p;
    Complex z0;
    Complex lambda;
    PowerSeries series;

    /// Default length 64, doubled (capped at 200) until the residual check passes.
    static PoincareFunction build(const PolynomialSpec& p, Complex z0, Complex lambda, int n_terms = 64)
    {
        int n = n_terms;
        for (;;) {
            try {
                return PoincareFunction{p, z0, lambda, schroeder_series(p, z0, lambda, n)};
            } catch (const ResidualError&) {
                if (n >= 200) {
                    throw;
                }
                n = std::min(200, 2 * n);
            }
        }
    }

    double order() const { return std::log(static_cast<double>(p.degree())) / std::log(std::abs(lambda)); }
};

/// Continuation state of w under repeated application of p, tracked in the
/// cheapest channel that still represents it: the value itself, its complex
/// log, or only log|w| as an ExtReal.
struct ContinuationState {
    enum class Channel { value, log, magnitude };
    Channel channel = Channel::value;
    Complex value;
    Complex log;           // log w, Im reduced to (-pi, pi]
    double phase_error = 0.0;
    ExtReal log_abs;       // log|w| when channel == magnitude
    bool phase_zero = false; // w known to be real positive in the magnitude channel

    ExtReal magnitude() const
    {
        switch (channel) {
        case Channel::value: return ExtReal::from_double(std::abs(value));
        case Channel::log: return ExtReal::from_log(log.real());
        default: return log_abs.exp();
        }
    }
};

inline constexpr double log_overflow = 690.77552789821368; // log(1e300)
inline constexpr double phase_reliable_error = 1e-6;

/// Applies p once. `log_derivative` (z f'(z)/f(z) along the continuation) is
/// multiplied by w p'(w)/p(w); `derivative`, when engaged, by p'(w).
inline void continuation_step(const Polynomial& p, ContinuationState& s, Complex& log_derivative,
                              std::optional<Complex>& derivative)
{
    using Channel = ContinuationState::Channel;
    const auto coeffs = p.coefficients();
    const std::size_t d = p.degree();
    const Complex lead = p.leading();
    if (s.channel == Channel::value) {
        const double a = std::abs(s.value);
        const bool safe = a == 0.0 || std::log(std::abs(lead)) + d * std::log(a) < log_overflow - 10.0;
        if (safe && a <= 1e30) {
            const auto [v, dv] = p.value_and_derivative(s.value);
            if (s.value != Complex(0.0) && v != Complex(0.0)) {
                log_derivative *= s.value * dv / v;
            } else if (v == Complex(0.0)) {
                log_derivative = Complex(std::numeric_limits<double>::infinity(), 0.0);
            }
            if (derivative) {
                *derivative *= dv;
                if (!is_finite(*derivative)) {
                    derivative.reset();
                }
            }
            s.value = v;
            return;
        }
        s.channel = Channel::log;
        s.log = std::log(s.value);
        s.phase_error = 1e-16 * std::abs(s.log.imag());
        derivative.reset();
    }
    if (s.channel == Channel::log) {
        // p(w) = lead w^d (1 + t), t = sum_{k<d} (c_k/lead) w^{k-d}
        Complex t(0.0);
        Complex num(static_cast<double>(d));
        for (std::size_t k = 0; k < d; ++k) {
            const Complex wk = std::exp((static_cast<double>(k) - static_cast<double>(d)) * s.log);
            const Complex term = coeffs[k] / lead * wk;
            t += term;
            num += static_cast<double>(k) * term;
        }
        log_derivative *= num / (1.0 + t);
        const Complex next = std::log(lead) + static_cast<double>(d) * s.log + std::log(1.0 + t);
        s.phase_error = d * s.phase_error + 1e-16 * std::abs(next.imag());
        if (next.real() > 1e300) {
            s.channel = Channel::magnitude;
            s.log_abs = ExtReal::from_double(next.real());
            s.phase_zero = next.imag() == 0.0 && s.phase_error == 0.0;
            return;
        }
        if (next.real() < log_overflow - 20.0) {
            s.channel = Channel::value;
            s.value = std::exp(next);
            return;
        }
        s.log = Complex(next.real(), reduce_angle(next.imag()));
        return;
    }
    log_derivative *= static_cast<double>(d);
    s.log_abs = s.log_abs.scaled(static_cast<double>(d)).plus(std::log(std::abs(lead)));
    s.phase_zero = s.phase_zero && p.has_real_coefficients() && lead.real() > 0.0;
}

/// f(z) by the Schröder continuation f(z) = p^n(f(z / lambda^n)).
struct PoincareValue {
    ContinuationState state;
    Complex log_derivative;            // z f'(z) / f(z); may be infinite
    std::optional<Complex> derivative; // f'(z) while representable
    int steps = 0;

    bool overflow() const { return state.channel != ContinuationState::Channel::value; }
    ExtReal magnitude() const { return state.magnitude(); }
    bool phase_reliable() const
    {
        switch (state.channel) {
        case ContinuationState::Channel::value: return true;
        case ContinuationState::Channel::log: return state.phase_error < phase_reliable_error;
        default: return state.phase_zero;
        }
    }
};

/// Least n >= 0 with |z| / |lambda|^n <= r0 / (2|lambda|).
inline int ladder_steps(const PoincareFunction& f, double abs_z)
{
    const double entry = f.series.radius() / (2.0 * std::abs(f.lambda));
    if (abs_z <= entry) {
        return 0;
    }
    int n = static_cast<int>(std::ceil(std::log(abs_z / entry) / std::log(std::abs(f.lambda))));
    n = std::max(n, 0);
    while (n > 0 && abs_z / std::pow(std::abs(f.lambda), n - 1) <= entry) {
        --n;
    }
    while (abs_z / std::pow(std::abs(f.lambda), n) > entry) {
        ++n;
    }
    return n;
}

/// Evaluates f at z; `extra_steps` enters the series that many levels deeper.
inline PoincareValue poincare_eval(const PoincareFunction& f, Complex z, int extra_steps = 0)
{
    const int n = ladder_steps(f, std::abs(z)) + extra_steps;
    Complex u = z;
    for (int k = 0; k < n; ++k) {
        u /= f.lambda;
    }
    const auto [g, dg] = f.series.value_and_derivative(u);
    PoincareValue out;
    out.steps = n;
    out.state.value = g;
    if (u == Complex(0.0)) {
        out.log_derivative = Complex(0.0);
    } else {
        out.log_derivative = (g == Complex(0.0)) ? Complex(std::numeric_limits<double>::infinity(), 0.0) : u * dg / g;
    }
    Complex lambda_pow(1.0);
    for (int k = 0; k < n; ++k) {
        lambda_pow *= f.lambda;
    }
    out.derivative = dg / lambda_pow;
    for (int k = 0; k < n; ++k) {
        continuation_step(f.p.poly(), out.state, out.log_derivative, out.derivative);
    }
    if (out.overflow()) {
        out.derivative.reset();
    }
    return out;
}

/// Same as poincare_eval for an argument given by its complex log (points far
/// outside double range). Returns nullopt when the ladder would exceed
/// `max_steps`.
inline std::optional<PoincareValue> poincare_eval_log(const PoincareFunction& f, Complex log_z, long max_steps = 200000)
{
    const double entry = std::log(f.series.radius() / (2.0 * std::abs(f.lambda)));
    const double log_lambda = std::log(std::abs(f.lambda));
    if (log_z.real() <= log_overflow) {
        return poincare_eval(f, std::exp(log_z));
    }
    const double n_real = std::ceil((log_z.real() - entry) / log_lambda);
    if (!(n_real <= static_cast<double>(max_steps))) {
        return std::nullopt;
    }
    const long n = static_cast<long>(n_real);
    const Complex log_u = log_z - static_cast<double>(n) * std::log(f.lambda);
    const Complex u = std::exp(Complex(log_u.real(), reduce_angle(log_u.imag())));
    const auto [g, dg] = f.series.value_and_derivative(u);
    PoincareValue out;
    out.steps = static_cast<int>(n);
    out.state.value = g;
    out.log_derivative = (g == Complex(0.0)) ? Complex(std::numeric_limits<double>::infinity(), 0.0) : u * dg / g;
    std::optional<Complex> no_derivative;
    for (long k = 0; k < n; ++k) {
        continuation_step(f.p.poly(), out.state, out.log_derivative, no_derivative);
    }
    return out;
}

/// Smallest R >= 1 with |p(w)| > 2|w| whenever |w| > R, from the coefficient
/// bound |p(w)| >= |lead||w|^d - sum_{k<d} |c_k| |w|^k.
inline double escape_radius(const PolynomialSpec& spec)
{
    const Polynomial& p = spec.poly();
    const auto coeffs = p.coefficients();
    const auto phi = [&](double r) {
        double v = std::abs(p.leading()) * std::pow(r, static_cast<double>(p.degree())) - 2.0 * r;
        for (std::size_t k = 0; k < p.degree(); ++k) {
            v -= std::abs(coeffs[k]) * std::pow(r, static_cast<double>(k));
        }
        return v;
    };
    if (phi(1.0) > 0.0) {
        return 1.0;
    }
    double lo = 1.0;
    double hi = 2.0;
    while (phi(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

struct KMembership {
    bool in_K = false;
    int escape_step = -1; // first n with |p^n(z)| > R_escape
};

inline KMembership filled_julia_membership(const PolynomialSpec& p, Complex z, int max_iter, double r_escape)
{
    if (!(r_escape >= escape_radius(p) * (1.0 - 1e-12))) {
        throw PreconditionError("filled_julia_membership: R_escape below the guaranteed escape radius");
    }
    Complex w = z;
    for (int n = 0; n <= max_iter; ++n) {
        if (std::abs(w) > r_escape) {
            return {false, n};
        }
        w = p(w);
    }
    return {true, -1};
}

inline constexpr double green_cutoff = 1e10;

/// Green's function of the basin of infinity: d^{-n} log|p^n(z)| with the
/// Böttcher constant log|lead|/(d-1) added once |p^n(z)| > 1e10 and one
/// extra iterate taken. Returns 0 if the orbit does not pass the cutoff
/// within n_iter steps.
inline double green(const PolynomialSpec& spec, Complex z, int n_iter = 1000)
{
    const Polynomial& p = spec.poly();
    const double d = static_cast<double>(p.degree());
    const double boettcher = std::log(std::abs(p.leading())) / (d - 1.0);
    Complex w = z;
    double scale = 1.0;
    for (int n = 0; n <= n_iter; ++n) {
        if (std::abs(w) > green_cutoff) {
            const Complex next = p(w);
            return (std::log(std::abs(next)) + boettcher) * scale / d;
        }
        w = p(w);
        scale /= d;
    }
    return 0.0;
}

/// |grad g(z)| * |z| by central differences with step |z| 1e-6.
inline double green_gradient_ratio(const PolynomialSpec& p, Complex z)
{
    const double r = std::abs(z);
    const double h = r * 1e-6;
    const double gx = (green(p, z + h) - green(p, z - h)) / (2.0 * h);
    const double gy = (green(p, z + Complex(0.0, h)) - green(p, z - Complex(0.0, h))) / (2.0 * h);
    return std::hypot(gx, gy) * r;
}

struct VnEntry {
    int n = 0;
    AreaEstimate estimate;
};

struct VnReport {
    std::vector<VnEntry> entries; // n = 0..n_max
    double theta_hat = std::numeric_limits<double>::quiet_NaN();
    int fit_first = 0;
    int fit_last = 0;
};

/// Area of V_n = {z : |p^k(z)| <= R for 0 <= k <= n} on the box [-R, R]^2 and
/// the decay ratio from a least-squares fit of log area against n over
/// 1 <= n <= n_max (entries with zero area are left out).
inline VnReport vn_area(const PolynomialSpec& spec, double R, int n_max, int resolution, Parallelism par = {})
{
    const Polynomial& p = spec.poly();
    double psi = std::abs(p.leading()) * std::pow(R, static_cast<double>(p.degree())) - 2.0 * R;
    for (std::size_t k = 0; k < p.degree(); ++k) {
        psi -= std::abs(p.coefficients()[k]) * std::pow(R, static_cast<double>(k));
    }
    if (!(psi > 0.0)) {
        throw PreconditionError("vn_area: R must satisfy |p(z)| > 2R for |z| > R");
    }
    if (n_max < 1) {
        throw PreconditionError("vn_area: n_max must be positive");
    }
    const WindowSpec box(-R, R, -R, R);
    VnReport rep;
    for (int n = 0; n <= n_max; ++n) {
        const auto in_vn = [&](Complex z) {
            Complex w = z;
            for (int k = 0; k <= n; ++k) {
                if (std::abs(w) > R) {
                    return false;
                }
                if (k < n) {
                    w = p(w);
                }
            }
            return true;
        };
        rep.entries.push_back({n, area_window(in_vn, box, resolution, par)});
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    rep.fit_first = -1;
    for (const VnEntry& e : rep.entries) {
        if (e.n < 1 || !(e.estimate.value > 0.0)) {
            continue;
        }
        if (rep.fit_first < 0) {
            rep.fit_first = e.n;
        }
        rep.fit_last = e.n;
        const double x = e.n;
        const double y = std::log(e.estimate.value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        rep.theta_hat = std::exp(slope);
    }
    return rep;
}

} // namespace entire_dyn::poincare
