#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "complex_util.hpp"
#include "ext_real.hpp"
#include "function_kernel.hpp"

// Growth models that carry |f| past the point where f(z) itself leaves double
// range. A far point is known only by its modulus (an ExtReal) and, when the
// orbit has stayed on a ray the model can follow exactly, its phase.
//
// Lower bounds drive classification; upper bounds come from log M(r, f).
//   P sin(alpha z + beta): log|f| >= deg log r + log|lead| + |Im w| - log 2
//   exponential sums:      the dominant term once its exponent wins by a margin
//   sigma:                 V(z) + min psi, with V's quadratic form and psi periodic
//   Poincaré functions:    Schröder continuation, then log log|f| = rho log r + kappa
namespace entire_dyn {

struct FarPoint {
    ExtReal modulus;
    std::optional<double> phase;
};

struct FarImage {
    ExtReal lower;
    ExtReal upper;
    std::optional<double> phase;
    /// Lower bound on |w f'(w) / f(w)| at the far point w itself.
    ExtReal log_derivative_lower;
};

/// Radii up to this are handled by direct max_modulus sampling.
inline constexpr double direct_max_modulus_radius = 100.0;

inline int max_modulus_samples(double r) { return std::max(4096, static_cast<int>(std::ceil(64.0 * r))); }

namespace detail {

// log r as a double when it fits, NaN otherwise.
inline double log_or_nan(const ExtReal& r)
{
    const double l = r.log_double();
    return std::isfinite(l) ? l : std::numeric_limits<double>::quiet_NaN();
}

// value + offset where the offset may be dropped once negligible or unknown
inline ExtReal plus_if_finite(const ExtReal& v, double offset)
{
    if (!std::isfinite(offset)) {
        return v;
    }
    if (v.level() == 0 && v.base() + offset < 0.0) {
        return ExtReal();
    }
    return v.plus(offset);
}

inline constexpr double exact_ladder_log_limit = 1e8;

// log M(r) of a Poincaré function for r > 100 from an exactly sampled radius
// r0 = r / |lambda|^k and log(l_k + c0) = k log d + log(l_0 + c0).
inline ExtReal poincare_log_max_modulus(const FunctionSpec& f, const ExtReal& r, bool upper)
{
    const PoincareFamily& fam = f.as_poincare();
    const PoincareGrowth& g = *fam.growth;
    const double d = static_cast<double>(fam.fn.p.degree());
    const double log_lambda = std::log(std::abs(fam.fn.lambda));
    const double rho = std::log(d) / log_lambda;
    const double L = log_or_nan(r);
    if (std::isfinite(L) && L <= exact_ladder_log_limit) {
        const double k = std::ceil((L - std::log(direct_max_modulus_radius)) / log_lambda);
        const double r0 = std::exp(L - k * log_lambda);
        const double l0 = max_modulus(f, r0, max_modulus_samples(r0)).log_double();
        const double loglog = k * std::log(d) + std::log(std::max(l0 + g.boettcher, 1e-300));
        return plus_if_finite(ExtReal::from_log(loglog), -g.boettcher);
    }
    const double kappa = upper ? g.kappa_max : g.kappa_min;
    return r.log().scaled(rho).plus(kappa).exp();
}

} // namespace detail

/// log M(r, f) for r > 100 from the family's growth model.
inline ExtReal log_max_modulus_model(const FunctionSpec& f, const ExtReal& r, bool upper = true)
{
    const double L = detail::log_or_nan(r);
    switch (f.family()) {
    case Family::polysin: {
        const PolySin& p = f.as_polysin();
        const double offset = std::log(std::abs(p.P.leading())) + std::abs(p.beta.imag()) - std::numbers::ln2
            + static_cast<double>(p.P.degree()) * L;
        return detail::plus_if_finite(r.scaled(std::abs(p.alpha)), offset);
    }
    case Family::expsum: {
        const ExpSum& e = f.as_expsum();
        ExtReal best;
        for (const ExpSumTerm& t : e.terms) {
            const double offset = std::log(std::abs(t.a.leading())) + static_cast<double>(t.a.degree()) * L;
            best = max(best, detail::plus_if_finite(r.scaled(std::abs(t.b)), offset));
        }
        return upper ? detail::plus_if_finite(best, std::log(static_cast<double>(e.terms.size()))) : best;
    }
    case Family::sigma: {
        const SigmaLattice& s = f.as_sigma();
        return detail::plus_if_finite(r.pow(2.0).scaled(0.5 * (s.ctx->B() + s.ctx->A())), s.psi.psi_max);
    }
    default: return detail::poincare_log_max_modulus(f, r, upper);
    }
}

/// M(r, f) for any radius: direct sampling up to r = 100, the model beyond.
inline ExtReal max_modulus_any(const FunctionSpec& f, const ExtReal& r, bool upper = true)
{
    const double rd = r.to_double();
    if (rd <= direct_max_modulus_radius) {
        return max_modulus(f, rd, max_modulus_samples(rd));
    }
    return log_max_modulus_model(f, r, upper).exp();
}

namespace detail {

inline FarImage unknown_far(const FunctionSpec& f, const FarPoint& p)
{
    return {ExtReal(), max_modulus_any(f, p.modulus, true), std::nullopt, ExtReal()};
}

inline FarImage far_polysin(const FunctionSpec& f, const FarPoint& p)
{
    if (!p.phase) {
        return unknown_far(f, p);
    }
    const PolySin& ps = f.as_polysin();
    const auto [c, s] = exact_cos_sin(*p.phase);
    const Complex dir(c, s);
    const Complex a = ps.alpha * dir;
    const double L = log_or_nan(p.modulus);
    if (a.imag() == 0.0) {
        // Im w stays bounded: |sin w| is O(1) with unknown phase
        return unknown_far(f, p);
    }
    // |Im w| = r |Im a| + sign(Im a) Im beta
    const double sign = a.imag() > 0.0 ? 1.0 : -1.0;
    const double offset = std::log(std::abs(ps.P.leading())) + static_cast<double>(ps.P.degree()) * L
        + sign * ps.beta.imag() - std::numbers::ln2;
    const ExtReal log_lower = plus_if_finite(p.modulus.scaled(std::abs(a.imag())), offset);
    FarImage out;
    out.lower = log_lower.exp();
    // w f'/f = w P'/P + alpha w cot(alpha w + beta) and |cot| -> 1 off the real direction
    out.log_derivative_lower = plus_if_finite(p.modulus.scaled(std::abs(ps.alpha) * (1.0 - 1e-12)),
                                              -static_cast<double>(ps.P.degree()));
    out.upper = max_modulus_any(f, p.modulus, true);
    if (out.upper < out.lower) {
        out.upper = out.lower;
    }
    if (a.real() == 0.0) {
        // sin w = (i/2) e^{-iw}(1 + tiny) for Im w -> +inf, -(i/2) e^{iw} for Im w -> -inf
        const double re_w = ps.beta.real();
        const double sin_phase = sign > 0.0 ? pi / 2 - re_w : -pi / 2 + re_w;
        const double poly_phase = std::arg(ps.P.leading()) + static_cast<double>(ps.P.degree()) * (*p.phase);
        out.phase = reduce_angle(sin_phase + poly_phase);
    }
    return out;
}

inline FarImage far_expsum(const FunctionSpec& f, const FarPoint& p)
{
    if (!p.phase) {
        return unknown_far(f, p);
    }
    const ExpSum& e = f.as_expsum();
    const auto [c, s] = exact_cos_sin(*p.phase);
    const Complex dir(c, s);
    std::size_t top = 0;
    double top_re = -std::numeric_limits<double>::infinity();
    double second_re = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < e.terms.size(); ++k) {
        const double re = (e.terms[k].b * dir).real();
        if (re > top_re) {
            second_re = top_re;
            top_re = re;
            top = k;
        } else if (re > second_re) {
            second_re = re;
        }
    }
    if (!(top_re > 0.0) || !(top_re - second_re > 1e-12)) {
        return unknown_far(f, p);
    }
    const ExpSumTerm& t = e.terms[top];
    const double L = log_or_nan(p.modulus);
    const double offset = std::log(std::abs(t.a.leading())) + static_cast<double>(t.a.degree()) * L - std::numbers::ln2;
    FarImage out;
    out.lower = plus_if_finite(p.modulus.scaled(top_re), offset).exp();
    out.log_derivative_lower = plus_if_finite(p.modulus.scaled(std::abs(t.b) * (1.0 - 1e-12)),
                                              -static_cast<double>(t.a.degree()));
    out.upper = max(out.lower, max_modulus_any(f, p.modulus, true));
    if ((t.b * dir).imag() == 0.0) {
        out.phase = reduce_angle(std::arg(t.a.leading()) + static_cast<double>(t.a.degree()) * (*p.phase));
    }
    return out;
}

inline FarImage far_sigma(const FunctionSpec& f, const FarPoint& p)
{
    const SigmaLattice& s = f.as_sigma();
    const double B = s.ctx->B();
    const double A = s.ctx->A();
    double coeff_low = 0.5 * (B - A);
    if (p.phase) {
        coeff_low = 0.5 * (B + A * std::cos(s.ctx->alpha_phase() + 2.0 * (*p.phase)));
    }
    FarImage out;
    out.upper = max_modulus_any(f, p.modulus, true);
    // zeta(z) = B conj(z) + (eta1 - B) z + bounded periodic part
    double zeta_coeff = B - A;
    if (p.phase) {
        const auto [c, sn] = exact_cos_sin(*p.phase);
        const Complex dir(c, sn);
        zeta_coeff = std::abs(B * std::conj(dir) + (s.ctx->eta1() - B) * dir);
    }
    if (zeta_coeff > 1e-12 * B) {
        out.log_derivative_lower = p.modulus.pow(2.0).scaled(zeta_coeff * (1.0 - 1e-6));
    }
    if (coeff_low > 1e-12 * B) {
        // V r^2 minus the linear loss next to lattice points; both corrections are
        // below the precision of a modulus beyond 1e300, so a relative margin covers them
        out.lower = p.modulus.pow(2.0).scaled(coeff_low * (1.0 - 1e-12)).exp();
    }
    return out;
}

inline bool real_positive_ray(const poincare::PoincareFunction& fn)
{
    const Polynomial& p = fn.p.poly();
    return p.has_real_coefficients() && p.leading().real() > 0.0 && fn.z0.imag() == 0.0 && fn.lambda.imag() == 0.0
        && fn.lambda.real() > 0.0;
}

// w f'/f ~ rho log f(w) for f(w) ~ exp(c w^rho)
inline ExtReal rho_log_lower(const PoincareFamily& fam, const ExtReal& lower)
{
    if (lower < ExtReal::from_double(std::numbers::e)) {
        return {};
    }
    return lower.log().scaled(fam.fn.order() * (1.0 - 1e-9));
}

inline FarImage far_poincare(const FunctionSpec& f, const FarPoint& p)
{
    if (!p.phase) {
        return unknown_far(f, p);
    }
    const PoincareFamily& fam = f.as_poincare();
    const double L = log_or_nan(p.modulus);
    FarImage out;
    out.upper = max_modulus_any(f, p.modulus, true);
    if (std::isfinite(L)) {
        const auto v = poincare::poincare_eval_log(fam.fn, Complex(L, *p.phase));
        if (v) {
            out.lower = v->magnitude();
            out.upper = max(out.upper, out.lower);
            if (is_finite(v->log_derivative)) {
                out.log_derivative_lower = ExtReal::from_double(std::abs(v->log_derivative));
            } else {
                out.log_derivative_lower = rho_log_lower(fam, out.lower);
            }
            if (v->phase_reliable()) {
                if (v->state.channel == poincare::ContinuationState::Channel::value) {
                    out.phase = std::arg(v->state.value);
                } else if (v->state.channel == poincare::ContinuationState::Channel::log) {
                    out.phase = v->state.log.imag();
                } else {
                    out.phase = 0.0;
                }
            }
            return out;
        }
    }
    // Beyond the continuation ladder: only the positive real ray of a real
    // Poincaré function is followed, through log log|f| = rho log r + kappa.
    if (!real_positive_ray(fam.fn) || exact_cos_sin(*p.phase) != std::pair<double, double>{1.0, 0.0}) {
        out.lower = ExtReal();
        return out;
    }
    const double d = static_cast<double>(fam.fn.p.degree());
    const double log_lambda = std::log(fam.fn.lambda.real());
    const double rho = std::log(d) / log_lambda;
    const double c0 = fam.growth->boettcher;
    double kappa_min = std::numeric_limits<double>::infinity();
    bool positive = true;
    constexpr int samples = 32;
    const double r_low = direct_max_modulus_radius / fam.fn.lambda.real();
    for (int i = 0; i < samples; ++i) {
        const double r0 = r_low * std::pow(fam.fn.lambda.real(), (i + 0.5) / samples);
        const poincare::PoincareValue v = poincare::poincare_eval(fam.fn, Complex(r0, 0.0));
        const double log_abs = v.magnitude().log_double();
        if (v.state.channel == poincare::ContinuationState::Channel::value) {
            positive = positive && v.state.value.imag() == 0.0 && v.state.value.real() > 0.0;
        }
        if (!(log_abs + c0 > 1.0)) {
            out.lower = ExtReal();
            return out;
        }
        kappa_min = std::min(kappa_min, std::log(log_abs + c0) - rho * std::log(r0));
    }
    out.lower = p.modulus.log().scaled(rho).plus(kappa_min).exp().exp();
    out.upper = max(out.upper, out.lower);
    out.log_derivative_lower = rho_log_lower(fam, out.lower);
    if (positive) {
        out.phase = 0.0;
    }
    return out;
}

} // namespace detail

/// Bounds on |f(w)| for a point known only through its modulus (and maybe
/// its phase). A lower bound of 0 means the model cannot say anything.
inline FarImage eval_far(const FunctionSpec& f, const FarPoint& p)
{
    switch (f.family()) {
    case Family::polysin: return detail::far_polysin(f, p);
    case Family::expsum: return detail::far_expsum(f, p);
    case Family::sigma: return detail::far_sigma(f, p);
    default: return detail::far_poincare(f, p);
    }
}

} // namespace entire_dyn
