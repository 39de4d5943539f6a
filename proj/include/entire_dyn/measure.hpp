#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "area.hpp"
#include "errors.hpp"
#include "ext_real.hpp"
#include "function_kernel.hpp"
#include "growth.hpp"

namespace entire_dyn {

/// Source of n(r), the number of a-points in |z| <= r.
///
/// closed_form: P sin(alpha z + beta) uses ceil(2|alpha| r / pi) + deg P + 1
/// (zero spacing of the sine factor plus a slack for the zeros of P); sigma
/// counts lattice points with |w| <= r exactly.
/// bound_3d1: log M(e r, f) + C, with C = 0 unless configured.
class NrOracle {
public:
    enum class Mode { closed_form, bound_3d1 };

    static NrOracle closed_form(FunctionSpec f)
    {
        if (f.family() != Family::polysin && f.family() != Family::sigma) {
            throw PreconditionError("NrOracle: closed form exists only for P sin and sigma");
        }
        return NrOracle(Mode::closed_form, std::move(f), 0.0);
    }

    static NrOracle bound_3d1(FunctionSpec f, double C = 0.0)
    {
        if (!std::isfinite(C)) {
            throw PreconditionError("NrOracle: C must be finite");
        }
        return NrOracle(Mode::bound_3d1, std::move(f), C);
    }

    Mode mode() const { return mode_; }
    double C() const { return c_; }
    const FunctionSpec& function() const { return f_; }

private:
    NrOracle(Mode m, FunctionSpec f, double c) : mode_(m), f_(std::move(f)), c_(c) {}

    Mode mode_;
    FunctionSpec f_;
    double c_;
};

/// Lattice points m + n tau with |m + n tau| <= r, counted row by row.
inline double lattice_count(Complex tau, double r)
{
    const double slack = 1e-12 * std::max(1.0, r);
    const long long n_max = static_cast<long long>(std::floor((r + slack) / tau.imag()));
    double count = 0.0;
    for (long long n = -n_max; n <= n_max; ++n) {
        const double y = static_cast<double>(n) * tau.imag();
        const double rest = r * r - y * y;
        if (rest < -slack * r) {
            continue;
        }
        const double s = std::sqrt(std::max(0.0, rest));
        const double shift = static_cast<double>(n) * tau.real();
        const double lo = std::ceil(-shift - s - slack);
        const double hi = std::floor(-shift + s + slack);
        if (hi >= lo) {
            count += hi - lo + 1.0;
        }
    }
    return count;
}

inline double n_of_r(const NrOracle& oracle, double r)
{
    if (!(r >= 1.0) || !std::isfinite(r)) {
        throw PreconditionError("n_of_r: r must be at least 1");
    }
    const FunctionSpec& f = oracle.function();
    if (oracle.mode() == NrOracle::Mode::bound_3d1) {
        return max_modulus_any(f, ExtReal::from_double(std::numbers::e * r)).log_double() + oracle.C();
    }
    if (f.family() == Family::polysin) {
        const PolySin& p = f.as_polysin();
        return std::ceil(2.0 * std::abs(p.alpha) * r / pi) + static_cast<double>(p.P.degree()) + 1.0;
    }
    return lattice_count(f.as_sigma().tau, r);
}

/// n(r) for radii beyond double range; the lattice count is replaced by its
/// area asymptotic pi r^2 / Im tau.
inline ExtReal n_of_r(const NrOracle& oracle, const ExtReal& r)
{
    const double rd = r.to_double();
    if (rd <= 1e6) {
        return ExtReal::from_double(n_of_r(oracle, rd));
    }
    const FunctionSpec& f = oracle.function();
    if (oracle.mode() == NrOracle::Mode::bound_3d1) {
        const ExtReal log_m = log_max_modulus_model(f, r.scaled(std::numbers::e));
        return detail::plus_if_finite(log_m, oracle.C());
    }
    if (f.family() == Family::polysin) {
        const PolySin& p = f.as_polysin();
        return r.scaled(2.0 * std::abs(p.alpha) / pi).plus(static_cast<double>(p.P.degree()) + 2.0);
    }
    return r.pow(2.0).scaled(pi / f.as_sigma().tau.imag());
}

struct ElRatio {
    double r = 0.0;
    double ratio = 0.0;
    AreaEstimate estimate;
};

/// logarea({1 <= |z| <= r} with |f(z)| < R) / log r for each r.
inline std::vector<ElRatio> el_ratio(const FunctionSpec& f, double R, const std::vector<double>& r_list,
                                     int resolution, Parallelism par = {})
{
    if (!(R > 0.0)) {
        throw PreconditionError("el_ratio: R must be positive");
    }
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        if (!(r_list[i] > 1.0) || (i > 0 && !(r_list[i] > r_list[i - 1]))) {
            throw PreconditionError("el_ratio: r_list must be increasing and above 1");
        }
    }
    const ExtReal bound = ExtReal::from_double(R);
    const auto below = [&](Complex z) { return eval(f, z).magnitude < bound; };
    std::vector<ElRatio> out;
    for (double r : r_list) {
        const AreaEstimate est = logarea_grid(below, AnnulusSpec(1.0, r), resolution, par);
        out.push_back({r, est.value / std::log(r), est});
    }
    return out;
}

} // namespace entire_dyn
