#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "entire_dyn/poincare.hpp"

using namespace entire_dyn;
using namespace entire_dyn::poincare;

namespace {

PolynomialSpec square() { return PolynomialSpec(std::vector<Complex>{0.0, 0.0, 1.0}); }
PolynomialSpec chebyshev() { return PolynomialSpec(std::vector<Complex>{-2.0, 0.0, 1.0}); }

// 2 cosh(sqrt z) by its own Taylor series, summed to convergence.
Complex two_cosh_sqrt(Complex z)
{
    Complex term(2.0);
    Complex acc(0.0);
    for (int k = 0; k < 400; ++k) {
        acc += term;
        term *= z / static_cast<double>((2 * k + 1) * (2 * k + 2));
    }
    return acc;
}

} // namespace

TEST(Schroeder, SquareMapGivesExponentialCoefficients)
{
    const PowerSeries s = schroeder_series(square(), 1.0, 2.0, 40);
    double factorial = 1.0;
    for (int n = 0; n <= 40; ++n) {
        if (n > 0) {
            factorial *= n;
        }
        EXPECT_NEAR(std::abs(s.coefficients()[static_cast<std::size_t>(n)] * factorial - 1.0), 0.0, 1e-12) << n;
    }
    EXPECT_GT(s.radius(), 2.5);
}

TEST(Schroeder, ChebyshevGivesCoshSqrt)
{
    const PoincareFunction f = PoincareFunction::build(chebyshev(), 2.0, 4.0);
    for (Complex z : {Complex(0.3, 0.1), Complex(-5.0, 2.0), Complex(30.0, -12.0), Complex(-150.0, 0.0)}) {
        const PoincareValue v = poincare_eval(f, z);
        ASSERT_FALSE(v.overflow());
        const Complex expected = two_cosh_sqrt(z);
        EXPECT_LT(std::abs(v.state.value - expected), 1e-9 * std::max(1.0, std::abs(expected))) << z;
    }
}

TEST(Schroeder, RejectsNonFixedPoint)
{
    EXPECT_THROW(schroeder_series(square(), 2.0, 4.0, 32), PreconditionError);
    EXPECT_THROW(schroeder_series(square(), 1.0, 2.0, 1), PreconditionError);
}

TEST(FixedPoints, RepellingOnly)
{
    const auto sq = find_repelling_fixed_points(square());
    ASSERT_EQ(sq.size(), 1u);
    EXPECT_NEAR(std::abs(sq[0].z0 - 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(sq[0].multiplier - 2.0), 0.0, 1e-12);

    const auto ch = find_repelling_fixed_points(chebyshev());
    ASSERT_EQ(ch.size(), 2u);
    EXPECT_NEAR(std::abs(ch[0].z0 + 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(ch[1].z0 - 2.0), 0.0, 1e-13);
}

TEST(Continuation, ExponentialValuesDerivativeAndLogDerivative)
{
    const PoincareFunction f = PoincareFunction::build(square(), 1.0, 2.0);
    for (Complex z : {Complex(0.1, 0.0), Complex(10.0, 0.0), Complex(5.0, 5.0), Complex(-20.0, 3.0), Complex(40.0, 100.0)}) {
        const PoincareValue v = poincare_eval(f, z);
        ASSERT_FALSE(v.overflow());
        const Complex e = std::exp(z);
        EXPECT_LT(std::abs(v.state.value - e), 1e-10 * std::abs(e) * (1.0 + std::abs(z))) << z;
        ASSERT_TRUE(v.derivative.has_value());
        EXPECT_LT(std::abs(*v.derivative - e), 1e-10 * std::abs(e) * (1.0 + std::abs(z))) << z;
        EXPECT_LT(std::abs(v.log_derivative - z), 1e-9 * (1.0 + std::abs(z))) << z;
    }
}

TEST(Continuation, ExtraLadderStepsAgree)
{
    const PoincareFunction f = PoincareFunction::build(chebyshev(), 2.0, 4.0);
    const Complex z(12.0, -7.0);
    const Complex a = poincare_eval(f, z).state.value;
    const Complex b = poincare_eval(f, z, 2).state.value;
    EXPECT_LT(std::abs(a - b), 1e-10 * std::abs(a));
}

TEST(Continuation, OverflowKeepsLogAndMagnitude)
{
    const PoincareFunction f = PoincareFunction::build(square(), 1.0, 2.0);
    const PoincareValue v = poincare_eval(f, Complex(1000.0, 0.0));
    ASSERT_TRUE(v.overflow());
    EXPECT_NEAR(v.magnitude().log_double(), 1000.0, 1e-9);
    EXPECT_TRUE(v.phase_reliable());

    const auto far = poincare_eval_log(f, Complex(std::log(22026.465794806718), 0.0));
    ASSERT_TRUE(far.has_value());
    EXPECT_NEAR(far->magnitude().log_double(), 22026.465794806718, 1e-6);

    const auto huge = poincare_eval_log(f, Complex(2000.0, 0.0));
    ASSERT_TRUE(huge.has_value());
    ASSERT_EQ(huge->state.channel, ContinuationState::Channel::magnitude);
    // log|f| = e^2000, so log log|f| = 2000
    EXPECT_NEAR(huge->state.log_abs.log_double(), 2000.0, 1e-8);
    EXPECT_TRUE(huge->phase_reliable());
}

TEST(Green, SquareMapIsLogModulus)
{
    for (Complex z : {Complex(1.5, 0.2), Complex(-3.0, 4.0), Complex(1e3, 0.0)}) {
        EXPECT_NEAR(green(square(), z), std::log(std::abs(z)), 1e-12);
        EXPECT_NEAR(green_gradient_ratio(square(), z), 1.0, 1e-6);
    }
    EXPECT_EQ(green(square(), Complex(0.3, 0.4)), 0.0);
}

TEST(Green, FunctionalEquation)
{
    const PolynomialSpec p(std::vector<Complex>{Complex(-0.12, 0.75), 0.0, 1.0});
    for (Complex z : {Complex(1.1, 0.3), Complex(-0.9, 1.4), Complex(2.5, -2.0)}) {
        const double g = green(p, z);
        EXPECT_NEAR(green(p, p(z)), 2.0 * g, 1e-8);
    }
}

TEST(EscapeRadius, SquareAndChebyshev)
{
    EXPECT_NEAR(escape_radius(square()), 2.0, 1e-12);
    EXPECT_NEAR(escape_radius(chebyshev()), 1.0 + std::sqrt(3.0), 1e-12);
}

TEST(FilledJulia, UnitCircleAndEscape)
{
    for (Complex z : {Complex(1.0, 0.0), Complex(-1.0, 0.0), Complex(0.0, 1.0), Complex(0.0, -1.0), Complex(0.5, 0.5)}) {
        EXPECT_TRUE(filled_julia_membership(square(), z, 10000, 2.0).in_K) << z;
    }
    const KMembership out = filled_julia_membership(square(), Complex(1.5, 0.0), 100, 2.0);
    EXPECT_FALSE(out.in_K);
    EXPECT_EQ(out.escape_step, 1);
    EXPECT_THROW(filled_julia_membership(square(), 0.0, 10, 1.5), PreconditionError);
}

TEST(Vn, SquareMapAreaTendsToDisc)
{
    const VnReport rep = vn_area(square(), 2.5, 4, 256);
    EXPECT_NEAR(rep.entries.front().estimate.value, 6.25 * pi, 0.05);
    EXPECT_NEAR(rep.entries.back().estimate.value, pi * std::pow(2.5, 2.0 / 16.0), 0.05);
    EXPECT_THROW(vn_area(square(), 2.0, 4, 256), PreconditionError);
}

TEST(Vn, ChebyshevAreaDecaysGeometrically)
{
    const VnReport rep = vn_area(chebyshev(), 3.0, 6, 512);
    EXPECT_LT(rep.theta_hat, 0.95);
    for (std::size_t i = 1; i < rep.entries.size(); ++i) {
        EXPECT_LE(rep.entries[i].estimate.value, rep.entries[i - 1].estimate.value);
    }
}
