#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"
#include "ext_real.hpp"
#include "poincare.hpp"
#include "polynomial.hpp"
#include "weierstrass.hpp"

namespace entire_dyn {

enum class Family { polysin, expsum, sigma, poincare };

/// P(z) sin(alpha z + beta).
struct PolySin {
    Polynomial P;
    Complex alpha;
    Complex beta;
};

struct ExpSumTerm {
    Polynomial a;
    Complex b;
};

/// sum_k a_k(z) e^{b_k z}.
struct ExpSum {
    std::vector<ExpSumTerm> terms;
};

/// Bounds on psi = log|sigma| - V over a period cell. psi is doubly periodic
/// because V has exactly the lattice increments of log|sigma|.
struct SigmaPsiBounds {
    double psi_max = 0.0;
    /// min of psi(u) - log|u| over the cell, u measured from the nearest lattice point.
    double psi_regular_min = 0.0;
};

struct SigmaLattice {
    Complex tau;
    std::shared_ptr<const weierstrass::LatticeContext> ctx;
    SigmaPsiBounds psi;
};

/// kappa(r) = log(log M(r) + c0) - rho log r over one multiplicative period,
/// where c0 = log|lead p| / (d - 1). Asymptotically log log M(r) = rho log r + kappa.
struct PoincareGrowth {
    double boettcher = 0.0;
    double r_low = 0.0; // sampled radii cover [r_low, r_low |lambda|]
    double kappa_min = 0.0;
    double kappa_max = 0.0;
};

struct PoincareFamily {
    poincare::PoincareFunction fn;
    std::shared_ptr<const PoincareGrowth> growth;
};

class FunctionSpec;
ExtReal max_modulus(const FunctionSpec& f, double r, int samples = 4096);

/// An entire function from one of the four supported families. Immutable
/// once built; copies share cached lattice and growth data.
class FunctionSpec {
public:
    using Params = std::variant<PolySin, ExpSum, SigmaLattice, PoincareFamily>;

    static FunctionSpec polysin(Polynomial P, Complex alpha, Complex beta)
    {
        if (P.is_zero()) {
            throw PreconditionError("PolySin: P must not vanish identically");
        }
        if (alpha == Complex(0.0) || !is_finite(alpha) || !is_finite(beta)) {
            throw PreconditionError("PolySin: alpha must be finite and non-zero");
        }
        return FunctionSpec(PolySin{std::move(P), alpha, beta});
    }

    static FunctionSpec sine() { return polysin(Polynomial(std::vector<Complex>{1.0}), 1.0, 0.0); }

    /// Terms must come ordered by arg b_k in [0, 2 pi), strictly increasing,
    /// with consecutive gaps at most pi and total spread at least pi.
    static FunctionSpec expsum(std::vector<ExpSumTerm> terms)
    {
        if (terms.size() < 2) {
            throw PreconditionError("ExpSum: need at least two terms");
        }
        constexpr double slack = 1e-12;
        std::vector<double> args;
        for (const ExpSumTerm& t : terms) {
            if (t.b == Complex(0.0) || !is_finite(t.b)) {
                throw PreconditionError("ExpSum: every b_k must be finite and non-zero");
            }
            if (t.a.is_zero()) {
                throw PreconditionError("ExpSum: every a_k must be non-zero");
            }
            double a = std::arg(t.b);
            if (a < 0.0) {
                a += two_pi;
            }
            args.push_back(a);
        }
        for (std::size_t k = 0; k + 1 < args.size(); ++k) {
            if (!(args[k] < args[k + 1])) {
                throw PreconditionError("ExpSum: arg b_k must be strictly increasing");
            }
            if (args[k + 1] > args[k] + pi + slack) {
                throw PreconditionError("ExpSum: consecutive arguments may differ by at most pi");
            }
        }
        if (args.front() > args.back() - pi + slack) {
            throw PreconditionError("ExpSum: arguments must spread over at least pi");
        }
        return FunctionSpec(ExpSum{std::move(terms)});
    }

    static FunctionSpec sigma(Complex tau)
    {
        auto ctx = std::make_shared<const weierstrass::LatticeContext>(tau);
        const SigmaPsiBounds psi = sample_psi(*ctx);
        return FunctionSpec(SigmaLattice{tau, std::move(ctx), psi});
    }

    static FunctionSpec poincare(const PolynomialSpec& p, Complex z0, Complex lambda, int n_terms = 64)
    {
        if (!(std::abs(lambda) > 1.0)) {
            throw PreconditionError("Poincare: |lambda| must exceed 1");
        }
        const Complex derivative = p.poly().derivative()(z0);
        if (std::abs(derivative - lambda) > 1e-9 * std::max(1.0, std::abs(lambda))) {
            throw PreconditionError("Poincare: lambda must equal p'(z0)");
        }
        if (std::abs(p(z0) - z0) > 1e-9 * std::max(1.0, std::abs(z0))) {
            throw PreconditionError("Poincare: z0 must be a fixed point of p");
        }
        FunctionSpec f(PoincareFamily{poincare::PoincareFunction::build(p, z0, lambda, n_terms), nullptr});
        auto& fam = std::get<PoincareFamily>(f.params_);
        fam.growth = std::make_shared<const PoincareGrowth>(sample_poincare_growth(f));
        return f;
    }

    Family family() const { return static_cast<Family>(params_.index()); }
    const Params& params() const { return params_; }

    const PolySin& as_polysin() const { return std::get<PolySin>(params_); }
    const ExpSum& as_expsum() const { return std::get<ExpSum>(params_); }
    const SigmaLattice& as_sigma() const { return std::get<SigmaLattice>(params_); }
    const PoincareFamily& as_poincare() const { return std::get<PoincareFamily>(params_); }

private:
    explicit FunctionSpec(Params p) : params_(std::move(p)) {}

    static SigmaPsiBounds sample_psi(const weierstrass::LatticeContext& ctx)
    {
        constexpr int grid = 64;
        SigmaPsiBounds out{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                const double s = (i + 0.5) / grid - 0.5;
                const double t = (j + 0.5) / grid - 0.5;
                const Complex u = s + t * ctx.tau();
                const double psi = ctx.log_sigma_reduced(u).real() - weierstrass::V_cartesian(ctx, u);
                out.psi_max = std::max(out.psi_max, psi);
                out.psi_regular_min = std::min(out.psi_regular_min, psi - std::log(std::abs(u)));
            }
        }
        return out;
    }

    static PoincareGrowth sample_poincare_growth(const FunctionSpec& f);

    Params params_;
};

/// f(z) when representable; otherwise |f(z)| as an ExtReal, with the phase
/// kept only when it is known to better than 1e-9.
struct FunctionValue {
    std::optional<Complex> value;
    ExtReal magnitude;
    std::optional<double> phase;

    bool overflow() const { return !value.has_value(); }
};

inline constexpr double log_machine_cap = 690.77552789821368; // log(1e300)
inline constexpr double phase_tolerance = 1e-9;
inline constexpr double zero_value_tolerance = 1e-300;

namespace detail {

inline FunctionValue from_value(Complex v)
{
    FunctionValue out;
    out.value = v;
    out.magnitude = ExtReal::from_double(std::abs(v));
    out.phase = std::arg(v);
    return out;
}

// log f with an estimate of the absolute error in its imaginary part.
inline FunctionValue from_log(Complex log_f, double phase_error)
{
    if (log_f.real() < log_machine_cap) {
        // In range the value is returned even when its phase is noise, exactly
        // as a direct double evaluation would. Quarter-turn phases are
        // snapped so that values on the axes keep a zero component.
        const auto [c, s] = exact_cos_sin(log_f.imag());
        const double m = std::exp(log_f.real());
        return from_value(Complex(m * c, m * s));
    }
    FunctionValue out;
    out.magnitude = ExtReal::from_log(log_f.real());
    if (phase_error < phase_tolerance) {
        out.phase = reduce_angle(log_f.imag());
    }
    return out;
}

inline FunctionValue zero_value() { return from_value(Complex(0.0)); }

/// log P(z), or nullopt where P(z) = 0.
inline std::optional<Complex> log_poly(const Polynomial& P, Complex z)
{
    const Complex v = P(z);
    if (is_finite(v) && std::abs(v) < overflow_threshold) {
        if (v == Complex(0.0)) {
            return std::nullopt;
        }
        return std::log(v);
    }
    const auto c = P.coefficients();
    const std::size_t d = P.degree();
    const Complex lead = P.leading();
    const Complex lz = std::log(z);
    Complex t(0.0);
    for (std::size_t k = 0; k < d; ++k) {
        t += c[k] / lead * std::exp((static_cast<double>(k) - static_cast<double>(d)) * lz);
    }
    return std::log(lead) + static_cast<double>(d) * lz + std::log(1.0 + t);
}

/// z P'(z) / P(z) without overflow for large z.
inline Complex poly_log_derivative(const Polynomial& P, Complex z)
{
    const auto [v, dv] = P.value_and_derivative(z);
    if (is_finite(v) && is_finite(dv) && std::abs(v) < overflow_threshold) {
        return z * dv / v;
    }
    const auto c = P.coefficients();
    const std::size_t d = P.degree();
    const Complex lead = P.leading();
    const Complex lz = std::log(z);
    Complex num(static_cast<double>(d));
    Complex den(1.0);
    for (std::size_t k = 0; k < d; ++k) {
        const Complex r = c[k] / lead * std::exp((static_cast<double>(k) - static_cast<double>(d)) * lz);
        num += static_cast<double>(k) * r;
        den += r;
    }
    return num / den;
}

inline FunctionValue eval_polysin(const PolySin& f, Complex z)
{
    const Complex w = f.alpha * z + f.beta;
    if (std::abs(w.imag()) <= 30.0 && std::abs(z) <= 1e10) {
        const Complex v = f.P(z) * std::sin(w);
        if (is_finite(v) && std::abs(v) <= overflow_threshold) {
            return from_value(v);
        }
    }
    const auto lp = log_poly(f.P, z);
    if (!lp) {
        return zero_value();
    }
    const Complex ls = log_sin(w);
    const Complex l = *lp + ls;
    return from_log(l, 1e-16 * (std::abs(ls.imag()) + std::abs(lp->imag()) + 1.0));
}

inline FunctionValue eval_expsum(const ExpSum& f, Complex z)
{
    std::vector<Complex> logs;
    std::size_t top = 0;
    bool any = false;
    for (const ExpSumTerm& t : f.terms) {
        const auto la = log_poly(t.a, z);
        if (!la) {
            logs.push_back(Complex(-std::numeric_limits<double>::infinity(), 0.0));
            continue;
        }
        logs.push_back(*la + t.b * z);
        if (!any || logs.back().real() > logs[top].real()) {
            top = logs.size() - 1;
            any = true;
        }
    }
    if (!any) {
        return zero_value();
    }
    if (logs[top].real() < log_machine_cap - 5.0) {
        Complex sum(0.0);
        for (const ExpSumTerm& t : f.terms) {
            sum += t.a(z) * std::exp(t.b * z);
        }
        return from_value(sum);
    }
    Complex rest(0.0);
    for (std::size_t k = 0; k < logs.size(); ++k) {
        if (k != top && std::isfinite(logs[k].real())) {
            rest += std::exp(logs[k] - logs[top]);
        }
    }
    if (1.0 + rest == Complex(0.0)) {
        return zero_value();
    }
    return from_log(logs[top] + std::log(1.0 + rest), 1e-16 * (std::abs(logs[top].imag()) + 1.0));
}

inline constexpr double sigma_reduction_limit = 1e12;

inline FunctionValue eval_sigma(const SigmaLattice& f, Complex z)
{
    if (std::abs(z) > sigma_reduction_limit) {
        // beyond exact lattice reduction: magnitude from V alone, phase unknown
        FunctionValue out;
        out.magnitude = ExtReal::from_log(weierstrass::V_cartesian(*f.ctx, z));
        return out;
    }
    const weierstrass::SigmaValue s = weierstrass::sigma(*f.ctx, z);
    if (s.zero) {
        return zero_value();
    }
    return from_log(s.log_value, 1e-16 * (std::abs(s.log_value.imag()) + std::abs(s.log_value.real()) + 1.0));
}

inline FunctionValue eval_poincare(const PoincareFamily& f, Complex z)
{
    const poincare::PoincareValue v = poincare::poincare_eval(f.fn, z);
    if (!v.overflow()) {
        return from_value(v.state.value);
    }
    FunctionValue out;
    out.magnitude = v.magnitude();
    if (v.phase_reliable()) {
        out.phase = v.state.channel == poincare::ContinuationState::Channel::log ? v.state.log.imag() : 0.0;
    }
    return out;
}

} // namespace detail

inline FunctionValue eval(const FunctionSpec& f, Complex z)
{
    if (!is_finite(z)) {
        throw PreconditionError("eval: argument must be finite");
    }
    switch (f.family()) {
    case Family::polysin: return detail::eval_polysin(f.as_polysin(), z);
    case Family::expsum: return detail::eval_expsum(f.as_expsum(), z);
    case Family::sigma: return detail::eval_sigma(f.as_sigma(), z);
    default: return detail::eval_poincare(f.as_poincare(), z);
    }
}

/// f'(z) from the closed forms; nullopt outside machine range.
inline std::optional<Complex> eval_derivative(const FunctionSpec& f, Complex z)
{
    std::optional<Complex> out;
    switch (f.family()) {
    case Family::polysin: {
        const PolySin& p = f.as_polysin();
        const Complex w = p.alpha * z + p.beta;
        const auto [v, dv] = p.P.value_and_derivative(z);
        out = dv * std::sin(w) + p.alpha * v * std::cos(w);
        break;
    }
    case Family::expsum: {
        Complex acc(0.0);
        for (const ExpSumTerm& t : f.as_expsum().terms) {
            const auto [v, dv] = t.a.value_and_derivative(z);
            acc += (dv + t.b * v) * std::exp(t.b * z);
        }
        out = acc;
        break;
    }
    case Family::sigma: {
        const SigmaLattice& s = f.as_sigma();
        const weierstrass::ReducedPoint r = s.ctx->reduce(z);
        if (std::abs(r.z) < weierstrass::pole_tolerance) {
            // sigma'(w) = eps(w) e^{eta(w) w / 2} at a lattice point w, corrected to first order
            const Complex w = s.ctx->lattice_point(r.m, r.n);
            const Complex eta_w = static_cast<double>(r.m) * s.ctx->eta1() + static_cast<double>(r.n) * s.ctx->eta2();
            const double sign = (r.m % 2 == 0 && r.n % 2 == 0) ? 1.0 : -1.0;
            out = sign * std::exp(eta_w * (r.z + 0.5 * w)) * (1.0 + eta_w * r.z);
            break;
        }
        const weierstrass::SigmaValue sv = weierstrass::sigma(*s.ctx, z);
        out = std::exp(sv.log_value) * weierstrass::zeta(*s.ctx, z);
        break;
    }
    default: out = poincare::poincare_eval(f.as_poincare().fn, z).derivative; break;
    }
    if (out && (!is_finite(*out) || std::abs(*out) > overflow_threshold)) {
        out.reset();
    }
    return out;
}

/// z f'(z) / f(z) from the closed forms (z cot for the sine factor, z zeta
/// for sigma, the continuation recurrence for Poincaré functions).
inline Complex eval_log_derivative(const FunctionSpec& f, Complex z)
{
    const auto zero_error = [] { return ZeroDivisionError("eval_log_derivative: f(z) vanishes"); };
    Complex out;
    switch (f.family()) {
    case Family::polysin: {
        const PolySin& p = f.as_polysin();
        const FunctionValue v = detail::eval_polysin(p, z);
        if (v.magnitude.to_double() < zero_value_tolerance) {
            throw zero_error();
        }
        const Complex w = p.alpha * z + p.beta;
        out = detail::poly_log_derivative(p.P, z) + z * p.alpha * cot(w);
        break;
    }
    case Family::expsum: {
        const ExpSum& e = f.as_expsum();
        double scale = -std::numeric_limits<double>::infinity();
        for (const ExpSumTerm& t : e.terms) {
            scale = std::max(scale, (t.b * z).real());
        }
        Complex num(0.0);
        Complex den(0.0);
        for (const ExpSumTerm& t : e.terms) {
            const auto [v, dv] = t.a.value_and_derivative(z);
            const Complex g = std::exp(t.b * z - scale);
            num += (dv + t.b * v) * g;
            den += v * g;
        }
        if (std::abs(den) < zero_value_tolerance) {
            throw zero_error();
        }
        out = z * num / den;
        break;
    }
    case Family::sigma: {
        try {
            out = z * weierstrass::zeta(*f.as_sigma().ctx, z);
        } catch (const PoleError&) {
            throw zero_error();
        }
        break;
    }
    default: {
        const poincare::PoincareValue v = poincare::poincare_eval(f.as_poincare().fn, z);
        if (!v.overflow() && std::abs(v.state.value) < zero_value_tolerance) {
            throw zero_error();
        }
        out = v.log_derivative;
        break;
    }
    }
    if (!is_finite(out)) {
        throw zero_error();
    }
    return out;
}

/// Closed-form order: 1 for P sin and exponential sums, 2 for sigma,
/// log d / log|lambda| for Poincaré functions.
inline double order(const FunctionSpec& f)
{
    switch (f.family()) {
    case Family::polysin:
    case Family::expsum: return 1.0;
    case Family::sigma: return 2.0;
    default: return f.as_poincare().fn.order();
    }
}

/// max |f| over `samples` equispaced points of |z| = r, refined by a
/// golden-section search around the best sample. A lower bound on M(r, f);
/// the families oscillate O(r) times per circle, so callers should scale
/// `samples` with r.
inline ExtReal max_modulus(const FunctionSpec& f, double r, int samples)
{
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw PreconditionError("max_modulus: r must be finite and non-negative");
    }
    if (samples < 64) {
        throw PreconditionError("max_modulus: need at least 64 samples");
    }
    if (r == 0.0) {
        return eval(f, Complex(0.0)).magnitude;
    }
    const auto mag = [&](double theta) { return eval(f, std::polar(r, theta)).magnitude; };
    const double step = two_pi / samples;
    ExtReal best = mag(0.0);
    int best_j = 0;
    for (int j = 1; j < samples; ++j) {
        const ExtReal m = mag(step * j);
        if (best < m) {
            best = m;
            best_j = j;
        }
    }
    constexpr double g = 0.61803398874989485;
    double a = step * best_j - step;
    double b = step * best_j + step;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    ExtReal f1 = mag(x1);
    ExtReal f2 = mag(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = mag(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = mag(x1);
        }
    }
    return max(best, max(f1, f2));
}

inline PoincareGrowth FunctionSpec::sample_poincare_growth(const FunctionSpec& f)
{
    const poincare::PoincareFunction& fn = f.as_poincare().fn;
    const double d = static_cast<double>(fn.p.degree());
    const double abs_lambda = std::abs(fn.lambda);
    const double rho = std::log(d) / std::log(abs_lambda);
    PoincareGrowth g;
    g.boettcher = std::log(std::abs(fn.p.poly().leading())) / (d - 1.0);
    g.r_low = 100.0 / abs_lambda;
    g.kappa_min = std::numeric_limits<double>::infinity();
    g.kappa_max = -std::numeric_limits<double>::infinity();
    constexpr int radii = 16;
    for (int i = 0; i < radii; ++i) {
        const double r = g.r_low * std::pow(abs_lambda, (i + 0.5) / radii);
        const ExtReal m = max_modulus(f, r, std::max(4096, static_cast<int>(64.0 * r)));
        const double log_m = m.log_double();
        const double kappa = std::log(std::max(log_m + g.boettcher, 1e-300)) - rho * std::log(r);
        g.kappa_min = std::min(g.kappa_min, kappa);
        g.kappa_max = std::max(g.kappa_max, kappa);
    }
    return g;
}

} // namespace entire_dyn
