#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "complex_util.hpp"
#include "errors.hpp"

namespace entire_dyn {

/// Dense polynomial with complex coefficients in ascending degree.
/// Trailing zero coefficients are trimmed on construction.
class Polynomial {
public:
    Polynomial() : coeffs_{Complex(0.0)} {}

    explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs))
    {
        while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0)) {
            coeffs_.pop_back();
        }
        if (coeffs_.empty()) {
            coeffs_.push_back(Complex(0.0));
        }
        for (const Complex& c : coeffs_) {
            if (!is_finite(c)) {
                throw DomainError("Polynomial: coefficients must be finite");
            }
        }
    }

    std::span<const Complex> coefficients() const { return coeffs_; }
    std::size_t degree() const { return coeffs_.size() - 1; }
    Complex leading() const { return coeffs_.back(); }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0.0); }

    bool has_real_coefficients() const
    {
        for (const Complex& c : coeffs_) {
            if (c.imag() != 0.0) {
                return false;
            }
        }
        return true;
    }

    Complex operator()(Complex z) const
    {
        Complex acc = coeffs_.back();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            acc = acc * z + coeffs_[k];
        }
        return acc;
    }

    /// (p(z), p'(z)) by one Horner pass.
    std::pair<Complex, Complex> value_and_derivative(Complex z) const
    {
        Complex value = coeffs_.back();
        Complex deriv(0.0);
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            deriv = deriv * z + value;
            value = value * z + coeffs_[k];
        }
        return {value, deriv};
    }

    Polynomial derivative() const
    {
        if (coeffs_.size() == 1) {
            return Polynomial();
        }
        std::vector<Complex> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) {
            d[k - 1] = coeffs_[k] * static_cast<double>(k);
        }
        return Polynomial(std::move(d));
    }

    /// Taylor coefficients at `center`: p(center + h) = sum_j t_j h^j.
    std::vector<Complex> taylor_at(Complex center) const
    {
        std::vector<Complex> t = coeffs_;
        const std::size_t n = t.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = n - 1; k > i; --k) {
                t[k - 1] += center * t[k];
            }
        }
        return t;
    }

    /// Sum of |c_k| for k below the degree.
    double lower_coefficient_mass() const
    {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k) {
            s += std::abs(coeffs_[k]);
        }
        return s;
    }

    /// Largest |c_k|.
    double max_abs_coefficient() const
    {
        double m = 0.0;
        for (const Complex& c : coeffs_) {
            m = std::max(m, std::abs(c));
        }
        return m;
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<Complex> coeffs_;
};

/// Polynomial of degree d >= 2, the dynamical input of a Poincaré function.
class PolynomialSpec {
public:
    explicit PolynomialSpec(Polynomial p) : p_(std::move(p))
    {
        if (p_.degree() < 2) {
            throw PreconditionError("PolynomialSpec: degree must be at least 2");
        }
    }
    explicit PolynomialSpec(std::vector<Complex> coeffs) : PolynomialSpec(Polynomial(std::move(coeffs))) {}

    const Polynomial& poly() const { return p_; }
    std::size_t degree() const { return p_.degree(); }
    Complex operator()(Complex z) const { return p_(z); }

    friend bool operator==(const PolynomialSpec&, const PolynomialSpec&) = default;

private:
    Polynomial p_;
};

} // namespace entire_dyn
