#pragma once

#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <string>

#include "errors.hpp"

namespace entire_dyn {

/// Nonnegative magnitude in level-index form: the value is exp applied
/// `level` times to `base`. Used for orbit magnitudes and iterated maximum
/// moduli far beyond double range.
///
/// Representation rules (applied after every operation):
///  - base < base_cap; a base reaching the cap is replaced by its log and the
///    level incremented;
///  - if level >= 1 then base >= 1; a smaller base is replaced by e^base and
///    the level decremented.
/// Within these rules the representation is lazy: exp() only bumps the level,
/// so exp is exact. A value such as e^{e^2} may therefore appear either as
/// (1, e^2) or as (0, 1618.2). Comparisons and equality work on canonical()
/// forms, which push levels down as far as double range allows.
class ExtReal {
public:
    static constexpr double base_cap = 1e300;
    static double log_cap() { return 690.77552789821368; } // log(1e300)

    constexpr ExtReal() = default;

    static ExtReal from_double(double x)
    {
        if (!(x >= 0.0) || std::isinf(x)) {
            throw DomainError("ExtReal::from_double: value must be finite and nonnegative");
        }
        return raw(0, x);
    }

    /// e^log_value; -inf gives zero.
    static ExtReal from_log(double log_value)
    {
        if (std::isnan(log_value) || log_value == std::numeric_limits<double>::infinity()) {
            throw DomainError("ExtReal::from_log: log magnitude must be finite");
        }
        if (log_value < log_cap()) {
            return raw(0, std::exp(log_value));
        }
        return raw(1, log_value);
    }

    static ExtReal raw(unsigned level, double base)
    {
        if (std::isnan(base) || std::isinf(base) || base < 0.0) {
            throw DomainError("ExtReal: base must be finite and nonnegative");
        }
        ExtReal r;
        r.level_ = level;
        r.base_ = base;
        r.normalize();
        return r;
    }

    unsigned level() const { return level_; }
    double base() const { return base_; }
    bool is_zero() const { return level_ == 0 && base_ == 0.0; }

    ExtReal exp() const { return raw(level_ + 1, base_); }

    /// Natural log; requires value >= 1.
    ExtReal log() const
    {
        if (level_ >= 1) {
            return raw(level_ - 1, base_);
        }
        if (base_ < 1.0) {
            throw DomainError("ExtReal::log: value below 1 has a negative logarithm");
        }
        return raw(0, std::log(base_));
    }

    /// The value as a double, +inf when out of range.
    double to_double() const
    {
        const ExtReal c = canonical();
        if (c.level_ == 0) {
            return c.base_;
        }
        return std::numeric_limits<double>::infinity();
    }

    /// log of the value as a double; -inf for zero, +inf when out of range.
    double log_double() const
    {
        if (level_ == 0) {
            return std::log(base_);
        }
        return raw(level_ - 1, base_).to_double();
    }

    /// Same value with levels pushed down while the result fits in a double.
    ExtReal canonical() const
    {
        ExtReal r = *this;
        while (r.level_ >= 1 && r.base_ < log_cap()) {
            r.base_ = std::exp(r.base_);
            --r.level_;
        }
        return r;
    }

    /// Value times a positive factor.
    ExtReal scaled(double factor) const
    {
        if (!(factor > 0.0) || std::isinf(factor)) {
            throw DomainError("ExtReal::scaled: factor must be positive and finite");
        }
        if (level_ == 0) {
            const double v = base_ * factor;
            if (std::isfinite(v)) {
                return raw(0, v);
            }
            return from_log(std::log(base_) + std::log(factor));
        }
        return log().plus(std::log(factor)).exp();
    }

    /// Value plus a real offset; the result must stay nonnegative.
    ExtReal plus(double offset) const
    {
        if (std::isnan(offset) || std::isinf(offset)) {
            throw DomainError("ExtReal::plus: offset must be finite");
        }
        if (offset == 0.0) {
            return *this;
        }
        if (level_ == 0) {
            const double v = base_ + offset;
            if (v < 0.0) {
                throw DomainError("ExtReal::plus: result would be negative");
            }
            if (std::isfinite(v)) {
                return raw(0, v);
            }
            return from_log(std::log(base_) + std::log1p(offset / base_));
        }
        const double ratio = offset / to_double();
        if (ratio == 0.0) {
            return *this;
        }
        return log().plus(std::log1p(ratio)).exp();
    }

    /// Value raised to a positive power.
    ExtReal pow(double exponent) const
    {
        if (!(exponent > 0.0) || std::isinf(exponent)) {
            throw DomainError("ExtReal::pow: exponent must be positive and finite");
        }
        if (is_zero()) {
            return {};
        }
        if (level_ == 0) {
            const double v = std::pow(base_, exponent);
            if (std::isfinite(v) && v < base_cap) {
                return raw(0, v);
            }
            return from_log(exponent * std::log(base_));
        }
        return log().scaled(exponent).exp();
    }

    friend bool operator==(const ExtReal& a, const ExtReal& b)
    {
        const ExtReal ca = a.canonical();
        const ExtReal cb = b.canonical();
        return ca.level_ == cb.level_ && ca.base_ == cb.base_;
    }

    friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b)
    {
        const ExtReal ca = a.canonical();
        const ExtReal cb = b.canonical();
        if (ca.level_ != cb.level_) {
            return ca.level_ <=> cb.level_;
        }
        return ca.base_ <=> cb.base_;
    }

    /// Canonical forms share a level and bases agree to `rel_tol`.
    friend bool approx_equal(const ExtReal& a, const ExtReal& b, double rel_tol)
    {
        const ExtReal ca = a.canonical();
        const ExtReal cb = b.canonical();
        if (ca.level_ != cb.level_) {
            return false;
        }
        const double scale = std::max(std::abs(ca.base_), std::abs(cb.base_));
        return std::abs(ca.base_ - cb.base_) <= rel_tol * scale;
    }

    /// "L<level>:<base>" with 12 significant digits in the base.
    std::string to_string() const
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "L%u:%.12g", level_, base_);
        return buf;
    }

private:
    void normalize()
    {
        while (base_ >= base_cap) {
            base_ = std::log(base_);
            ++level_;
        }
        while (level_ > 0 && base_ < 1.0) {
            base_ = std::exp(base_);
            --level_;
        }
    }

    unsigned level_ = 0;
    double base_ = 0.0;
};

inline ExtReal max(const ExtReal& a, const ExtReal& b) { return (a < b) ? b : a; }
inline ExtReal min(const ExtReal& a, const ExtReal& b) { return (a < b) ? a : b; }

} // namespace entire_dyn
