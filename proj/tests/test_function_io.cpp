#include <gtest/gtest.h>

#include <random>

#include "entire_dyn.hpp"

using namespace entire_dyn;

namespace {

void expect_round_trip(const std::string& text)
{
    const std::string printed = print_function(parse_function(text));
    EXPECT_EQ(print_function(parse_function(printed)), printed) << text;
}

} // namespace

TEST(FunctionIo, RoundTripEveryFamily)
{
    expect_round_trip("family = polysin\nP = 1,0\nalpha = 1,0\nbeta = 0,0\n");
    expect_round_trip("family=polysin; P = 0.1,-2 3 0,1e-7; alpha = 0.3,1.7; beta = -0.5");
    expect_round_trip("family = expsum\nterm = 1,0 | 1,0\nterm = 2 0,1 | 0,1\nterm = 1 | -1,0\n");
    expect_round_trip("family = sigma\ntau = 0.3,1.2   # a skewed lattice\n");
    expect_round_trip("family = poincare\np = 0 0 1\nz0 = 1\nlambda = 2\n");
    expect_round_trip("family = poincare; p = -2 0 1; z0 = 2; lambda = 4; terms = 40");
}

TEST(FunctionIo, PrintedFormIsCanonical)
{
    const FunctionSpec f = parse_function("family=polysin;P=1 0 0;alpha=0.1;beta=0,-0.25");
    EXPECT_EQ(print_function(f), "family = polysin\nP = 1,0\nalpha = 0.1,0\nbeta = 0,-0.25\n");
    EXPECT_EQ(f.as_polysin().alpha, Complex(0.1, 0.0));
}

TEST(FunctionIo, RandomRealsSurviveExactly)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 500; ++i) {
        const Complex a(u(rng), u(rng) * 1e-9);
        EXPECT_EQ(parse_complex(format_complex(a)), a);
    }
}

TEST(FunctionIo, Errors)
{
    EXPECT_THROW(parse_function("P = 1"), ParseError);
    EXPECT_THROW(parse_function("family = bessel"), ParseError);
    EXPECT_THROW(parse_function("family = sigma; tau = 0,1; tau = 0,2"), ParseError);
    EXPECT_THROW(parse_function("family = sigma; tau = 0,1; alpha = 1"), ParseError);
    EXPECT_THROW(parse_function("family = sigma; tau = 0,x"), ParseError);
    EXPECT_THROW(parse_function("family = sigma; tau = 1,2,3"), ParseError);
    EXPECT_THROW(parse_function("family = sigma; tau = 0,-1"), PreconditionError);
    EXPECT_THROW(parse_function("family = polysin; P = 1; alpha = 0; beta = 0"), PreconditionError);
    EXPECT_THROW(parse_function("family = expsum; term = 1 | 1"), PreconditionError);
    EXPECT_THROW(parse_function("family = expsum; term = 1 1"), ParseError);
    EXPECT_THROW(parse_function("family = poincare; p = 0 0 1; z0 = 1; lambda = 2; terms = 4x"), ParseError);
    EXPECT_THROW(parse_function("family polysin"), ParseError);
}
