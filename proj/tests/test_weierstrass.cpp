#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "entire_dyn/counter_rng.hpp"
#include "entire_dyn/weierstrass.hpp"

using namespace entire_dyn;
using namespace entire_dyn::weierstrass;

namespace {

// Direct lattice sums over the disc |w| <= radius, kept independent of the
// row-sum kernels under test.
struct RawLattice {
    Complex tau;
    double radius;

    template <typename F>
    void for_each(F&& f) const
    {
        const long long n_max = static_cast<long long>(radius / tau.imag()) + 1;
        for (long long n = -n_max; n <= n_max; ++n) {
            const long long m_span = static_cast<long long>(radius + std::abs(n * tau.real())) + 1;
            for (long long m = -m_span; m <= m_span; ++m) {
                const Complex w = static_cast<double>(m) + static_cast<double>(n) * tau;
                if ((m != 0 || n != 0) && std::abs(w) <= radius) {
                    f(w);
                }
            }
        }
    }

    Complex log_sigma(Complex z) const
    {
        Complex acc = std::log(z);
        for_each([&](Complex w) {
            const Complex u = z / w;
            acc += std::log(1.0 - u) + u + 0.5 * u * u;
        });
        return acc;
    }

    Complex zeta(Complex z) const
    {
        Complex acc = 1.0 / z;
        for_each([&](Complex w) { acc += 1.0 / (z - w) + 1.0 / w + z / (w * w); });
        return acc;
    }

    Complex wp(Complex z) const
    {
        Complex acc = 1.0 / (z * z);
        for_each([&](Complex w) { acc += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w); });
        return acc;
    }
};

// log values compared modulo 2 pi i.
double log_distance(Complex a, Complex b)
{
    return std::hypot(a.real() - b.real(), reduce_angle(a.imag() - b.imag()));
}

} // namespace

TEST(Eta1, SquareLatticeIsPi)
{
    EXPECT_NEAR(std::abs(eta1(Complex(0.0, 1.0)) - pi), 0.0, 1e-13);
}

TEST(Eta1, HexagonalLatticeClosedForm)
{
    const Complex tau = std::polar(1.0, pi / 3.0);
    EXPECT_NEAR(std::abs(eta1(tau) - 2.0 * pi / std::sqrt(3.0)), 0.0, 1e-12);
}

TEST(Eta1, NomeAsymptoticAtLargeImTau)
{
    for (double y : {2.0, 3.0, 4.0}) {
        const Complex tau(0.3, y);
        const double q = std::exp(-two_pi * y);
        // next term of the q-expansion is 24 sigma_1(2) pi^2/3 q^2 = 72 pi^2/3 q^2
        EXPECT_LT(std::abs(eta1(tau) - eta1_asymptotic_nome(tau)), 240.0 * q * q + 1e-14) << y;
    }
}

TEST(Eta1, TailBoundForcesConvergenceError)
{
    EXPECT_THROW(eta1_series(Complex(0.0, 0.05), 5), ConvergenceError);
    EXPECT_THROW(eta1(Complex(0.0, -1.0)), PreconditionError);
}

TEST(Lattice, LegendreRelation)
{
    for (Complex tau : {Complex(0.0, 1.0), Complex(0.4, 0.8), Complex(-0.3, 1.7), Complex(0.5, 0.5)}) {
        const LatticeContext ctx(tau);
        EXPECT_LT(ctx.legendre_residual(), 1e-10);
        EXPECT_LT(std::abs(ctx.eta1() * tau - ctx.eta2() - Complex(0.0, two_pi)), 1e-12);
    }
}

TEST(Lattice, SigmaMatchesRawProduct)
{
    for (Complex tau : {Complex(0.0, 1.0), Complex(0.3, 1.2)}) {
        const LatticeContext ctx(tau);
        const RawLattice raw{tau, 400.0};
        for (Complex z : {Complex(0.3, 0.2), Complex(1.3, -0.4), Complex(-0.7, 1.9), Complex(2.2, 2.1)}) {
            const SigmaValue s = sigma(ctx, z);
            ASSERT_FALSE(s.zero);
            EXPECT_LT(log_distance(s.log_value, raw.log_sigma(z)), 1e-6) << z;
        }
    }
}

TEST(Lattice, ZetaAndWpMatchRawSums)
{
    const Complex tau(0.2, 1.1);
    const LatticeContext ctx(tau);
    const RawLattice raw{tau, 400.0};
    for (Complex z : {Complex(0.31, 0.17), Complex(1.6, -0.45), Complex(-2.3, 1.2)}) {
        EXPECT_LT(std::abs(zeta(ctx, z) - raw.zeta(z)), 1e-5 * (1.0 + std::abs(z))) << z;
        EXPECT_LT(std::abs(wp(ctx, z) - raw.wp(z)), 1e-5) << z;
    }
}

TEST(Lattice, ZetaIsLogDerivativeOfSigma)
{
    const LatticeContext ctx(Complex(0.1, 0.9));
    const double h = 1e-4;
    // log sigma carries an unreduced phase, so differences are taken mod 2 pi i
    const auto diff = [](Complex a, Complex b) { return Complex(a.real() - b.real(), reduce_angle(a.imag() - b.imag())); };
    for (Complex z : {Complex(0.37, 0.21), Complex(3.4, -2.2), Complex(-7.9, 5.3)}) {
        const Complex d = diff(sigma(ctx, z + h).log_value, sigma(ctx, z - h).log_value) / (2.0 * h);
        const Complex di = diff(sigma(ctx, z + Complex(0, h)).log_value, sigma(ctx, z - Complex(0, h)).log_value)
            / Complex(0.0, 2.0 * h);
        const Complex zz = zeta(ctx, z);
        EXPECT_LT(std::abs(d - zz), 1e-6 * (1.0 + std::abs(zz))) << z;
        EXPECT_LT(std::abs(di - zz), 1e-6 * (1.0 + std::abs(zz))) << z;
        const Complex dz = (zeta(ctx, z + h) - zeta(ctx, z - h)) / (2.0 * h);
        EXPECT_LT(std::abs(-dz - wp(ctx, z)), 1e-6 * (1.0 + std::abs(wp(ctx, z)))) << z;
    }
}

TEST(Lattice, QuasiPeriodicitySigns)
{
    const LatticeContext ctx(Complex(0.25, 1.05));
    const Complex z(0.21, 0.13);
    const Complex s0 = sigma(ctx, z).log_value;
    for (int m = -2; m <= 2; ++m) {
        for (int n = -2; n <= 2; ++n) {
            const Complex w = ctx.lattice_point(m, n);
            const Complex eta_w = static_cast<double>(m) * ctx.eta1() + static_cast<double>(n) * ctx.eta2();
            Complex expected = s0 + eta_w * (z + 0.5 * w);
            if (m % 2 != 0 || n % 2 != 0) {
                expected += Complex(0.0, pi);
            }
            EXPECT_LT(log_distance(sigma(ctx, z + w).log_value, expected), 1e-9) << m << "," << n;
        }
    }
}

TEST(Lattice, OddnessAndZeros)
{
    const LatticeContext ctx(Complex(0.0, 1.3));
    const Complex z(0.41, -0.27);
    EXPECT_LT(log_distance(sigma(ctx, -z).log_value, sigma(ctx, z).log_value + Complex(0.0, pi)), 1e-12);
    EXPECT_TRUE(sigma(ctx, ctx.lattice_point(3, -2)).zero);
    EXPECT_THROW(zeta(ctx, ctx.lattice_point(1, 1)), PoleError);
    EXPECT_THROW(wp(ctx, Complex(0.0)), PoleError);
}

TEST(Lattice, SigmaFarOutsideDoubleRange)
{
    const LatticeContext ctx(Complex(0.0, 1.0));
    const SigmaValue s = sigma(ctx, Complex(300.3, 200.1));
    EXPECT_TRUE(std::isfinite(s.log_abs()));
    EXPECT_GT(s.log_abs(), 1000.0);
}

TEST(DiskCondition, DiskFormEquivalent)
{
    for (std::uint64_t i = 0; i < 400; ++i) {
        const Complex tau(-0.5 + counter_uniform(7, i, 0), 0.3 + 2.0 * counter_uniform(7, i, 1));
        const LatticeContext ctx(tau);
        const double lhs = (1.0 / ctx.eta1()).real() - tau.imag() / two_pi;
        if (std::abs(lhs) < 1e-12) {
            continue;
        }
        EXPECT_EQ(condition_8c(ctx), condition_8c_disk_form(ctx)) << tau;
    }
}

TEST(Growth, VPolarMatchesCartesian)
{
    const LatticeContext ctx(Complex(0.35, 0.9));
    for (std::uint64_t i = 0; i < 200; ++i) {
        const double r = 1.0 + 50.0 * counter_uniform(3, i, 0);
        const double t = two_pi * counter_uniform(3, i, 1) - pi;
        EXPECT_NEAR(V_cartesian(ctx, std::polar(r, t)), V_polar(ctx, r, t), 1e-10 * r * r);
    }
}

TEST(Exclusion, DiskAndSectorMembership)
{
    const LatticeContext ctx(Complex(0.0, 1.0));
    const ExclusionFlags at_lattice = exclusion_membership(ctx, Complex(5.0, 3.0) + 1e-9);
    EXPECT_TRUE(at_lattice.in_E);
    EXPECT_TRUE(at_lattice.in_F);
    const ExclusionFlags mid = exclusion_membership(ctx, Complex(5.5, 3.5));
    EXPECT_FALSE(mid.in_E);
    EXPECT_FALSE(mid.in_F);
    EXPECT_THROW(exclusion_membership(ctx, Complex(0.5, 0.0)), PreconditionError);
}
