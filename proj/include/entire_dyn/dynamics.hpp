#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"
#include "ext_real.hpp"
#include "function_kernel.hpp"
#include "growth.hpp"
#include "measure.hpp"

namespace entire_dyn {

enum class OrbitStatus { escaping, bounded, undecided };

/// One orbit point: exact while in double range, afterwards a modulus with
/// lower and upper bounds and possibly a known phase.
struct OrbitPoint {
    std::optional<Complex> z;
    ExtReal lower;
    ExtReal upper;
    std::optional<double> phase;

    static OrbitPoint exact(Complex w)
    {
        const ExtReal m = ExtReal::from_double(std::abs(w));
        return {w, m, m, std::arg(w)};
    }
};

/// The image of an orbit point together with |w f'(w)/f(w)| at the point
/// itself (a lower bound once the point is far).
struct OrbitStep {
    std::optional<OrbitPoint> next; // nullopt when the models lose the orbit
    std::optional<ExtReal> log_derivative;
    bool at_zero = false; // f(w) = 0 for an exact point
};

inline constexpr double cycle_tolerance = 1e-12;
inline constexpr std::size_t cycle_window = 64;

namespace detail {

inline OrbitStep step_far(const FunctionSpec& f, const FarPoint& p)
{
    const FarImage img = eval_far(f, p);
    OrbitStep s;
    s.log_derivative = img.log_derivative_lower;
    if (img.lower.is_zero()) {
        return s;
    }
    const double lo = img.lower.to_double();
    if (lo <= overflow_threshold) {
        // back in double range: continue exactly only if the point is pinned down
        if (img.phase && approx_equal(img.lower, img.upper, 1e-12)) {
            s.next = OrbitPoint::exact(std::polar(lo, *img.phase));
        }
        return s;
    }
    s.next = OrbitPoint{std::nullopt, img.lower, max(img.lower, img.upper), img.phase};
    return s;
}

} // namespace detail

/// Applies f once to an orbit point.
inline OrbitStep orbit_step(const FunctionSpec& f, const OrbitPoint& p)
{
    const bool sigma_far = f.family() == Family::sigma && p.z && std::abs(*p.z) > detail::sigma_reduction_limit;
    if (!p.z || sigma_far) {
        return detail::step_far(f, FarPoint{p.lower, p.phase});
    }
    const Complex w = *p.z;
    OrbitStep s;
    const FunctionValue v = eval(f, w);
    if (v.value) {
        s.next = OrbitPoint::exact(*v.value);
    } else {
        s.next = OrbitPoint{std::nullopt, v.magnitude, v.magnitude, v.phase};
    }
    if (v.magnitude.to_double() < zero_value_tolerance) {
        s.at_zero = true;
    } else {
        try {
            s.log_derivative = ExtReal::from_double(std::abs(eval_log_derivative(f, w)));
        } catch (const ZeroDivisionError&) {
            s.at_zero = true;
        }
    }
    return s;
}

struct OrbitRecord {
    std::vector<Complex> points;     // prefix of the orbit while representable
    std::vector<ExtReal> magnitudes; // lower bounds, one per iterate
    std::vector<ExtReal> upper_magnitudes;
    std::optional<int> escape_index;
    OrbitStatus status = OrbitStatus::undecided;
};

namespace detail {

// Orbits that provably stay bounded: a constant real P times sin of a real
// affine map keeps real points real and bounded by |P|.
inline bool bounded_real_invariant(const FunctionSpec& f, Complex w)
{
    if (f.family() != Family::polysin || w.imag() != 0.0) {
        return false;
    }
    const PolySin& p = f.as_polysin();
    return p.P.degree() == 0 && p.P.has_real_coefficients() && p.alpha.imag() == 0.0 && p.beta.imag() == 0.0;
}

} // namespace detail

/// Iterates until the lower-bound magnitude exceeds `bailout` (escaping),
/// a cycle repeats within 1e-12 or a bounded invariant applies (bounded), or
/// max_iter steps pass or the growth models lose the orbit (undecided).
/// Cycle detection is a heuristic over the last 64 exact points.
inline OrbitRecord iterate_orbit(const FunctionSpec& f, Complex z, int max_iter, const ExtReal& bailout)
{
    if (max_iter < 1 || max_iter > 1'000'000) {
        throw PreconditionError("iterate_orbit: need 1 <= max_iter <= 1e6");
    }
    OrbitRecord rec;
    OrbitPoint p = OrbitPoint::exact(z);
    std::deque<Complex> window;
    for (int n = 0;; ++n) {
        rec.magnitudes.push_back(p.lower);
        rec.upper_magnitudes.push_back(p.upper);
        if (p.z) {
            rec.points.push_back(*p.z);
        }
        if (bailout < p.lower) {
            rec.escape_index = n;
            rec.status = OrbitStatus::escaping;
            return rec;
        }
        if (p.z) {
            const Complex w = *p.z;
            if (detail::bounded_real_invariant(f, w)) {
                rec.status = OrbitStatus::bounded;
                return rec;
            }
            for (const Complex& u : window) {
                if (std::abs(u - w) <= cycle_tolerance * std::max(1.0, std::abs(w))) {
                    rec.status = OrbitStatus::bounded;
                    return rec;
                }
            }
            window.push_back(w);
            if (window.size() > cycle_window) {
                window.pop_front();
            }
        }
        if (n == max_iter) {
            return rec;
        }
        const OrbitStep s = orbit_step(f, p);
        if (!s.next) {
            return rec;
        }
        p = *s.next;
    }
}

inline OrbitStatus classify_escape(const FunctionSpec& f, Complex z, int max_iter, const ExtReal& bailout)
{
    return iterate_orbit(f, z, max_iter, bailout).status;
}

/// [M^1(R), ..., M^n(R)]: direct sampling while the radius is at most 100,
/// the family's log M model beyond.
inline std::vector<ExtReal> m_iterates(const FunctionSpec& f, double R, int n)
{
    if (!(R > 0.0) || n < 1 || n > 100) {
        throw PreconditionError("m_iterates: need R > 0 and 1 <= n <= 100");
    }
    std::vector<ExtReal> out;
    ExtReal r = ExtReal::from_double(R);
    for (int k = 0; k < n; ++k) {
        const ExtReal m = max_modulus_any(f, r, true);
        if (k == 0 && !(ExtReal::from_double(R) < m)) {
            throw PreconditionError("m_iterates: M(R, f) must exceed R");
        }
        out.push_back(m);
        r = m;
    }
    return out;
}

struct FastEscapeResult {
    bool detected = false;
    int L = -1;
};

/// Least L <= L_max with |f^n(z)| >= M^{n-L}(R) for all L < n <= M.size(), using
/// lower-bound magnitudes; M = m_iterates(f, R, max_iter). A semi-decision:
/// not detected says nothing about membership.
inline FastEscapeResult classify_fast_escape(const FunctionSpec& f, Complex z, const std::vector<ExtReal>& M,
                                             int L_max)
{
    if (L_max < 0 || M.empty()) {
        throw PreconditionError("classify_fast_escape: need L_max >= 0 and at least one M-iterate");
    }
    const int max_iter = static_cast<int>(M.size());
    std::vector<ExtReal> orbit;
    OrbitPoint p = OrbitPoint::exact(z);
    orbit.push_back(p.lower);
    for (int n = 1; n <= max_iter; ++n) {
        const OrbitStep s = orbit_step(f, p);
        if (!s.next) {
            break;
        }
        p = *s.next;
        orbit.push_back(p.lower);
    }
    for (int L = 0; L <= L_max; ++L) {
        bool ok = true;
        for (int n = L + 1; n <= max_iter && ok; ++n) {
            const ExtReal have = n < static_cast<int>(orbit.size()) ? orbit[static_cast<std::size_t>(n)] : ExtReal();
            ok = !(have < M[static_cast<std::size_t>(n - L - 1)]);
        }
        if (ok) {
            return {true, L};
        }
    }
    return {};
}

inline FastEscapeResult classify_fast_escape(const FunctionSpec& f, Complex z, double R, int L_max, int max_iter)
{
    if (max_iter < 1 || max_iter > 100) {
        throw PreconditionError("classify_fast_escape: need 1 <= max_iter <= 100");
    }
    return classify_fast_escape(f, z, m_iterates(f, R, max_iter), L_max);
}

enum class XThreshold { power_rho, power_n };
enum class YThreshold { linear, stretched, power_rho };

struct CriterionParams {
    double epsilon = 0.25;
    double R = 2.0;
    XThreshold x_threshold = XThreshold::power_rho;
    YThreshold y_threshold = YThreshold::linear;
    std::optional<NrOracle> n_oracle;

    void validate() const
    {
        if (!(epsilon > 0.0) || !(R > 1.0)) {
            throw PreconditionError("CriterionParams: need epsilon > 0 and R > 1");
        }
        if (x_threshold == XThreshold::power_n && !n_oracle) {
            throw PreconditionError("CriterionParams: the n(r) threshold needs an oracle");
        }
    }
};

struct CriterionCheck {
    bool holds = false;
    bool at_zero = false; // f vanished at the point; reported as not holding
    explicit operator bool() const { return holds; }
};

namespace detail {

inline ExtReal x_threshold(const FunctionSpec& f, const ExtReal& r, const CriterionParams& params)
{
    if (params.x_threshold == XThreshold::power_rho) {
        return r.pow(order(f) / 2.0 + params.epsilon);
    }
    return n_of_r(*params.n_oracle, r).pow(0.5 + params.epsilon);
}

inline ExtReal y_threshold(const FunctionSpec& f, const ExtReal& r, const CriterionParams& params)
{
    switch (params.y_threshold) {
    case YThreshold::linear: return r.scaled(1.0 + params.epsilon);
    case YThreshold::stretched: return r.pow(params.epsilon).exp();
    default: return r.pow(order(f) / 2.0 + params.epsilon).exp();
    }
}

inline CriterionCheck x_check(const FunctionSpec& f, const OrbitPoint& p, const OrbitStep& s,
                              const CriterionParams& params)
{
    if (s.at_zero) {
        return {false, true};
    }
    if (!s.log_derivative) {
        return {};
    }
    return {!(*s.log_derivative < x_threshold(f, p.lower, params)), false};
}

inline bool y_check(const FunctionSpec& f, const OrbitPoint& p, const OrbitStep& s, const CriterionParams& params)
{
    const ExtReal image = s.next ? s.next->lower : ExtReal();
    return !(image < y_threshold(f, p.lower, params));
}

} // namespace detail

/// |z f'(z)/f(z)| >= |z|^{rho/2 + eps} or n(|z|)^{1/2 + eps}.
inline CriterionCheck in_X(const FunctionSpec& f, Complex z, const CriterionParams& params)
{
    params.validate();
    if (!(std::abs(z) >= 1.0)) {
        throw PreconditionError("in_X: |z| >= 1 required");
    }
    const OrbitPoint p = OrbitPoint::exact(z);
    return detail::x_check(f, p, orbit_step(f, p), params);
}

/// |f(z)| >= (1 + eps)|z|, exp(|z|^eps) or exp(|z|^{rho/2 + eps}).
inline bool in_Y(const FunctionSpec& f, Complex z, const CriterionParams& params)
{
    params.validate();
    if (!(std::abs(z) >= 1.0)) {
        throw PreconditionError("in_Y: |z| >= 1 required");
    }
    const OrbitPoint p = OrbitPoint::exact(z);
    return detail::y_check(f, p, orbit_step(f, p), params);
}

struct XYCheck {
    CriterionCheck x;
    bool y = false;
    bool both() const { return x.holds && y; }
};

/// in_X and in_Y from a single evaluation of f at z.
inline XYCheck in_X_and_Y(const FunctionSpec& f, Complex z, const CriterionParams& params)
{
    params.validate();
    if (!(std::abs(z) >= 1.0)) {
        throw PreconditionError("in_X_and_Y: |z| >= 1 required");
    }
    const OrbitPoint p = OrbitPoint::exact(z);
    const OrbitStep s = orbit_step(f, p);
    return {detail::x_check(f, p, s, params), detail::y_check(f, p, s, params)};
}

struct TMembership {
    bool in_T = false;  // in_T_up_to(k_max)
    int excluded_at = -1;
    std::vector<ExtReal> magnitudes; // lower bounds for f^0 .. f^k
};

/// Least k <= k_max with f^k(z) outside X and Y or |f^k(z)| < R.
inline TMembership in_T(const FunctionSpec& f, Complex z, const CriterionParams& params, int k_max)
{
    params.validate();
    if (k_max < 0 || k_max > 1'000'000) {
        throw PreconditionError("in_T: need 0 <= k_max <= 1e6");
    }
    TMembership out;
    OrbitPoint p = OrbitPoint::exact(z);
    const ExtReal R = ExtReal::from_double(params.R);
    for (int k = 0; k <= k_max; ++k) {
        out.magnitudes.push_back(p.lower);
        if (p.lower < R) {
            out.excluded_at = k;
            return out;
        }
        const OrbitStep s = orbit_step(f, p);
        if (!detail::x_check(f, p, s, params) || !detail::y_check(f, p, s, params) || !s.next) {
            out.excluded_at = k;
            return out;
        }
        p = *s.next;
    }
    out.in_T = true;
    return out;
}

/// Largest x with exp(x^alpha) = x (equivalently x^alpha = log x), or 0 when
/// E_alpha(x) > x for every x > 0. Bisection in s = log x on a bracket to
/// the right of the minimum of e^{alpha s} - s.
inline double x_alpha(double alpha)
{
    if (!(alpha > 0.0)) {
        throw PreconditionError("x_alpha: alpha must be positive");
    }
    const auto g = [alpha](double s) { return std::exp(alpha * s) - s; };
    const double s_min = std::log(1.0 / alpha) / alpha;
    if (g(s_min) > 0.0) {
        return 0.0;
    }
    double lo = s_min;
    double hi = std::max(s_min + 1.0, 2.0 * s_min);
    while (g(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return std::exp(hi);
}

/// E_alpha^k(x) with E_alpha(x) = exp(x^alpha), evaluated as
/// exp exp F^{k-2}(alpha x^alpha), F(t) = alpha e^t, for k >= 2.
inline ExtReal tower_apply_E(double alpha, const ExtReal& x, int k)
{
    if (!(alpha > 0.0) || k < 0) {
        throw PreconditionError("tower_apply_E: need alpha > 0 and k >= 0");
    }
    if (!(ExtReal::from_double(x_alpha(alpha)) < x)) {
        throw PreconditionError("tower_apply_E: x must exceed the fixed point x_alpha");
    }
    if (k == 0) {
        return x;
    }
    if (k == 1) {
        return x.pow(alpha).exp();
    }
    ExtReal t = x.pow(alpha).scaled(alpha);
    for (int j = 0; j < k - 2; ++j) {
        t = t.exp().scaled(alpha);
    }
    return t.exp().exp();
}

struct TowerViolation {
    double x = 0.0;
    int k = 0;
};

struct TowerLemmaReport {
    std::optional<double> x0; // least grid x from which every tested k satisfies the inequality
    std::vector<TowerViolation> violations_below_x0;
    int violations_above_x0 = 0;
    std::size_t points_tested = 0;
};

/// Checks E_alpha^k(x) >= E_beta^{k-2}(x) on the grid for k_lo <= k <= k_hi.
inline TowerLemmaReport verify_tower_lemma(double alpha, double beta, std::vector<double> x_grid, int k_lo, int k_hi)
{
    if (!(beta > alpha) || !(alpha > 0.0)) {
        throw PreconditionError("verify_tower_lemma: need beta > alpha > 0");
    }
    if (!(4 <= k_lo && k_lo <= k_hi && k_hi <= 40)) {
        throw PreconditionError("verify_tower_lemma: need 4 <= k_lo <= k_hi <= 40");
    }
    std::sort(x_grid.begin(), x_grid.end());
    const double floor_x = std::max(x_alpha(alpha), x_alpha(beta));
    TowerLemmaReport rep;
    std::vector<bool> holds;
    std::vector<std::vector<int>> failing;
    for (double x : x_grid) {
        if (!(x > floor_x)) {
            continue;
        }
        ++rep.points_tested;
        const ExtReal ex = ExtReal::from_double(x);
        std::vector<int> bad;
        for (int k = k_lo; k <= k_hi; ++k) {
            if (tower_apply_E(alpha, ex, k) < tower_apply_E(beta, ex, k - 2)) {
                bad.push_back(k);
            }
        }
        holds.push_back(bad.empty());
        failing.push_back(std::move(bad));
    }
    std::size_t first = holds.size();
    while (first > 0 && holds[first - 1]) {
        --first;
    }
    std::size_t idx = 0;
    for (double x : x_grid) {
        if (!(x > floor_x)) {
            continue;
        }
        if (idx == first) {
            rep.x0 = x;
        }
        if (idx < first) {
            for (int k : failing[idx]) {
                rep.violations_below_x0.push_back({x, k});
            }
        }
        ++idx;
    }
    return rep;
}

} // namespace entire_dyn
