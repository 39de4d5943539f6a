#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "entire_dyn/function_kernel.hpp"
#include "entire_dyn/growth.hpp"

using namespace entire_dyn;

namespace {

const FunctionSpec& exp_fn()
{
    static const FunctionSpec f =
        FunctionSpec::poincare(PolynomialSpec(std::vector<Complex>{0.0, 0.0, 1.0}), 1.0, 2.0);
    return f;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Eval, SineOnImaginaryAxis)
{
    const FunctionValue v = eval(FunctionSpec::sine(), Complex(0.0, 10.0));
    ASSERT_TRUE(v.value);
    EXPECT_LT(std::abs(*v.value - Complex(0.0, std::sinh(10.0))), 1e-10 * std::sinh(10.0));
    EXPECT_EQ(*eval(FunctionSpec::sine(), 0.0).value, Complex(0.0));
}

TEST(Eval, SineOverflowMagnitude)
{
    const FunctionValue v = eval(FunctionSpec::sine(), Complex(1.0, 5000.0));
    ASSERT_TRUE(v.overflow());
    EXPECT_NEAR(v.magnitude.log_double(), 5000.0 - std::log(2.0), 1e-9);
}

TEST(Eval, PoincareOfSquareIsExp)
{
    const FunctionValue v = eval(exp_fn(), 1.0);
    ASSERT_TRUE(v.value);
    EXPECT_NEAR(v.value->real(), std::numbers::e, 1e-12);
    EXPECT_NEAR(v.value->imag(), 0.0, 1e-12);
    const Complex z(3.0, -7.5);
    EXPECT_LT(std::abs(*eval(exp_fn(), z).value - std::exp(z)), 1e-10 * std::abs(std::exp(z)));
}

TEST(Eval, ExpSumDominantTerm)
{
    // e^z + e^{-z} = 2 cosh z
    const FunctionSpec f = FunctionSpec::expsum({{Polynomial(std::vector<Complex>{1.0}), 1.0},
                                                 {Polynomial(std::vector<Complex>{1.0}), -1.0}});
    const Complex z(2.0, 0.7);
    EXPECT_LT(std::abs(*eval(f, z).value - 2.0 * std::cosh(z)), 1e-12 * std::abs(std::cosh(z)));
    EXPECT_NEAR(eval(f, 2000.0).magnitude.log_double(), 2000.0, 1e-9);
}

TEST(ExpSum, ValidatesArguments)
{
    const Polynomial one(std::vector<Complex>{1.0});
    EXPECT_THROW(FunctionSpec::expsum({{one, 1.0}}), PreconditionError);
    EXPECT_THROW(FunctionSpec::expsum({{one, -1.0}, {one, 1.0}}), PreconditionError);   // not increasing
    EXPECT_THROW(FunctionSpec::expsum({{one, 1.0}, {one, Complex(0.0, 1.0)}}), PreconditionError); // spread < pi
    EXPECT_THROW(FunctionSpec::expsum({{one, 1.0}, {one, 0.0}}), PreconditionError);
    EXPECT_NO_THROW(FunctionSpec::expsum({{one, 1.0}, {one, Complex(0.0, 1.0)}, {one, -1.0}}));
}

TEST(Validation, Families)
{
    EXPECT_THROW(FunctionSpec::polysin(Polynomial(), 1.0, 0.0), PreconditionError);
    EXPECT_THROW(FunctionSpec::polysin(Polynomial(std::vector<Complex>{1.0}), 0.0, 0.0), PreconditionError);
    const PolynomialSpec sq(std::vector<Complex>{0.0, 0.0, 1.0});
    EXPECT_THROW(FunctionSpec::poincare(sq, 2.0, 4.0), PreconditionError);
    EXPECT_THROW(FunctionSpec::poincare(sq, 1.0, 3.0), PreconditionError);
    EXPECT_THROW(FunctionSpec::poincare(sq, 0.0, 0.0), PreconditionError);
}

TEST(LogDerivative, SineClosedForm)
{
    const Complex v = eval_log_derivative(FunctionSpec::sine(), Complex(0.0, 10.0));
    EXPECT_NEAR(v.real(), 10.0 / std::tanh(10.0), 1e-12);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
    EXPECT_THROW(eval_log_derivative(FunctionSpec::sine(), 0.0), ZeroDivisionError);
}

TEST(LogDerivative, SigmaIsZTimesZeta)
{
    const FunctionSpec f = FunctionSpec::sigma(Complex(0.0, 1.0));
    const Complex z(0.3, 1.7);
    const Complex want = z * weierstrass::zeta(*f.as_sigma().ctx, z);
    EXPECT_LT(std::abs(eval_log_derivative(f, z) - want), 1e-14 * std::abs(want));
}

TEST(LogDerivative, PoincareNearZeroMatchesFiniteDifference)
{
    const FunctionSpec f = FunctionSpec::poincare(PolynomialSpec(std::vector<Complex>{-2.0, 0.0, 1.0}), 2.0, 4.0);
    const Complex z(1e-6, 0.0);
    const double h = 1e-9;
    const Complex fd = (eval(f, z + h).value.value() - eval(f, z - h).value.value()) / (2.0 * h);
    const Complex want = z * fd / eval(f, z).value.value();
    EXPECT_LT(std::abs(eval_log_derivative(f, z) - want), 1e-6 * std::max(1e-12, std::abs(want)));
}

TEST(LogDerivative, AgreesWithDerivativeQuotient)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    const std::vector<FunctionSpec> fs{
        FunctionSpec::sine(),
        FunctionSpec::polysin(Polynomial(std::vector<Complex>{1.0, Complex(0.0, 2.0), 0.5}), Complex(1.0, 0.5), 0.3),
        FunctionSpec::expsum({{Polynomial(std::vector<Complex>{1.0, 1.0}), 1.0},
                              {Polynomial(std::vector<Complex>{2.0}), Complex(0.0, 1.0)},
                              {Polynomial(std::vector<Complex>{0.0, 0.0, 1.0}), -1.0}}),
        FunctionSpec::sigma(Complex(0.3, 1.2)),
        exp_fn(),
    };
    for (const FunctionSpec& f : fs) {
        for (int i = 0; i < 200; ++i) {
            const Complex z(u(rng), u(rng));
            const FunctionValue v = eval(f, z);
            const auto d = eval_derivative(f, z);
            if (!v.value || !d || std::abs(*v.value) <= 1e-6) {
                continue;
            }
            const Complex want = *d * z / *v.value;
            EXPECT_LT(std::abs(eval_log_derivative(f, z) - want), 1e-9 * std::max(1.0, std::abs(want)))
                << "family " << static_cast<int>(f.family()) << " z = " << z;
        }
    }
}

TEST(Order, ClosedForms)
{
    EXPECT_EQ(order(FunctionSpec::sine()), 1.0);
    EXPECT_EQ(order(FunctionSpec::polysin(Polynomial(std::vector<Complex>{5.0, 0.0, 3.0}), 2.0, 1.0)), 1.0);
    EXPECT_EQ(order(FunctionSpec::sigma(Complex(0.0, 1.0))), 2.0);
    EXPECT_NEAR(order(FunctionSpec::poincare(PolynomialSpec(std::vector<Complex>{-2.0, 0.0, 1.0}), 2.0, 4.0)), 0.5,
                1e-15);
    EXPECT_NEAR(order(exp_fn()), 1.0, 1e-15);
}

TEST(MaxModulus, SineAndExp)
{
    EXPECT_LT(rel(max_modulus(FunctionSpec::sine(), 10.0, 1024).to_double(), std::sinh(10.0)), 1e-6);
    EXPECT_TRUE(max_modulus(FunctionSpec::sine(), 0.0).is_zero());
    EXPECT_LT(rel(max_modulus(exp_fn(), 5.0).to_double(), std::exp(5.0)), 1e-4);
}

TEST(MaxModulus, MonotoneInRadius)
{
    const std::vector<FunctionSpec> fs{FunctionSpec::sine(), FunctionSpec::sigma(Complex(0.0, 1.0)), exp_fn()};
    for (const FunctionSpec& f : fs) {
        ExtReal prev;
        for (double r = 0.5; r <= 12.0; r += 0.5) {
            const ExtReal m = max_modulus(f, r, 1024);
            EXPECT_FALSE(m < prev) << "r = " << r;
            prev = m;
        }
    }
}

TEST(Growth, ModelsMatchSamplingInRange)
{
    EXPECT_NEAR(log_max_modulus_model(FunctionSpec::sine(), ExtReal::from_double(1e6)).to_double(),
                1e6 - std::log(2.0), 1e-6);
    EXPECT_NEAR(log_max_modulus_model(exp_fn(), ExtReal::from_double(50.0)).to_double(), 50.0, 1e-6);
    const ExtReal m = max_modulus_any(exp_fn(), ExtReal::from_double(1e5));
    EXPECT_NEAR(m.log_double(), 1e5, 1e-3);
}

TEST(SineEstimates, StripComplementGrowth)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lr(0.0, std::log(1e5));
    std::uniform_real_distribution<double> th(-std::numbers::pi, std::numbers::pi);
    const FunctionSpec s = FunctionSpec::sine();
    int tested = 0;
    while (tested < 100000) {
        const Complex z = std::polar(std::exp(lr(rng)), th(rng));
        if (std::abs(z.imag()) < std::log(4.0 * std::abs(z) + 1.0)) {
            continue;
        }
        ++tested;
        ASSERT_FALSE(eval(s, z).magnitude < ExtReal::from_double(2.0 * std::abs(z))) << z;
    }
}

TEST(SineEstimates, LogDerivativeLowerBound)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> lr(std::log(16.0), std::log(1e5));
    std::uniform_real_distribution<double> th(-std::numbers::pi, std::numbers::pi);
    const FunctionSpec s = FunctionSpec::sine();
    int tested = 0;
    while (tested < 100000) {
        const Complex z = std::polar(std::exp(lr(rng)), th(rng));
        if (std::abs(z.imag()) < 1.0) {
            continue;
        }
        ++tested;
        ASSERT_GE(std::abs(eval_log_derivative(s, z)), std::pow(std::abs(z), 0.75)) << z;
    }
}
