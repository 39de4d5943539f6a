#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "entire_dyn/area.hpp"
#include "entire_dyn/measure.hpp"

using namespace entire_dyn;

namespace {

constexpr double two_pi_v = 2.0 * std::numbers::pi;

bool in_strip(Complex z) { return std::abs(z.imag()) < std::log(4.0 * std::abs(z) + 1.0); }

// logarea of the strip inside [a, b] by Simpson's rule in s = log r over the
// exact angular measure of the strip on each circle.
double strip_quadrature(double a, double b)
{
    const auto angular = [](double r) {
        const double h = std::log(4.0 * r + 1.0);
        return h >= r ? two_pi_v : 4.0 * std::asin(h / r);
    };
    const int n = 4000;
    const double s0 = std::log(a);
    const double ds = (std::log(b) - s0) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * angular(std::exp(s0 + i * ds));
    }
    return acc * ds / 3.0;
}

const FunctionSpec& exp_fn()
{
    static const FunctionSpec f =
        FunctionSpec::poincare(PolynomialSpec(std::vector<Complex>{0.0, 0.0, 1.0}), 1.0, 2.0);
    return f;
}

// A random union of half-planes and disks, used as a generic test region.
struct RandomRegion {
    std::vector<std::pair<Complex, double>> disks;
    Complex normal;
    double offset = 0.0;

    explicit RandomRegion(std::mt19937_64& rng)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 4; ++i) {
            disks.push_back({Complex(8.0 * u(rng), 8.0 * u(rng)), 2.0 + 2.0 * std::abs(u(rng))});
        }
        normal = std::polar(1.0, std::numbers::pi * u(rng));
        offset = 3.0 * u(rng);
    }

    bool operator()(Complex z) const
    {
        if ((z * std::conj(normal)).real() > offset + 6.0) {
            return true;
        }
        for (const auto& [c, r] : disks) {
            if (std::abs(z - c) < r) {
                return true;
            }
        }
        return false;
    }
};

} // namespace

TEST(LogArea, FullAnnulus)
{
    const auto all = [](Complex) { return true; };
    EXPECT_NEAR(logarea_grid(all, AnnulusSpec(1.0, std::numbers::e), 64).value, two_pi_v, 1e-12);
    EXPECT_NEAR(logarea_grid(all, AnnulusSpec(1.0, 7.0), 64).value, two_pi_v * std::log(7.0), 1e-12);
    const AreaEstimate mc = logarea_monte_carlo(all, AnnulusSpec(1.0, 7.0), 5000, 3);
    EXPECT_NEAR(mc.value, two_pi_v * std::log(7.0), 1e-12);
    EXPECT_EQ(mc.std_error, 0.0);
}

TEST(LogArea, HalfPlaneMonteCarlo)
{
    const AreaEstimate mc =
        logarea_monte_carlo([](Complex z) { return z.real() > 0.0; }, AnnulusSpec(1.0, std::numbers::e), 100000, 9);
    EXPECT_LT(std::abs(mc.value - std::numbers::pi), 3.0 * mc.std_error);
}

TEST(LogArea, StripMatchesQuadrature)
{
    for (int k = 4; k <= 10; ++k) {
        const double a = std::ldexp(1.0, k);
        const double want = strip_quadrature(a, 2.0 * a);
        const double got = logarea_grid(in_strip, AnnulusSpec(a, 2.0 * a), 2048).value;
        EXPECT_LT(std::abs(got - want), 0.05 * want) << "k = " << k;
    }
}

TEST(LogArea, StripGridAgreesWithMonteCarlo)
{
    const AnnulusSpec ann(16.0, 32.0);
    const AreaEstimate g = logarea_grid(in_strip, ann, 512);
    const AreaEstimate mc = logarea_monte_carlo(in_strip, ann, 1'000'000, 17);
    EXPECT_LT(std::abs(g.value - mc.value), 3.0 * (g.error() + mc.error()));
}

TEST(LogArea, MonteCarloDeterministicAcrossWorkers)
{
    const AnnulusSpec ann(2.0, 50.0);
    const AreaEstimate a = logarea_monte_carlo(in_strip, ann, 200000, 5, Parallelism{1});
    const AreaEstimate b = logarea_monte_carlo(in_strip, ann, 200000, 5, Parallelism{4});
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    const AreaEstimate g1 = logarea_grid(in_strip, ann, 256, Parallelism{1});
    const AreaEstimate g3 = logarea_grid(in_strip, ann, 256, Parallelism{3});
    EXPECT_EQ(g1.value, g3.value);
    EXPECT_EQ(g1.grid_delta, g3.grid_delta);
}

TEST(LogArea, AdditiveOverAnnuli)
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
        const RandomRegion S(rng);
        const AreaEstimate lo = logarea_grid(S, AnnulusSpec(2.0, 4.0), 512);
        const AreaEstimate hi = logarea_grid(S, AnnulusSpec(4.0, 8.0), 512);
        const AreaEstimate all = logarea_grid(S, AnnulusSpec(2.0, 8.0), 1024);
        EXPECT_LE(std::abs(lo.value + hi.value - all.value), lo.error() + hi.error() + all.error() + 1e-3);
    }
}

TEST(LogArea, MonotoneUnderInclusion)
{
    std::mt19937_64 rng(22);
    for (int i = 0; i < 10; ++i) {
        const RandomRegion S(rng);
        const auto smaller = [&](Complex z) { return S(z) && z.imag() > 0.0; };
        const AnnulusSpec ann(1.0, 20.0);
        const AreaEstimate a = logarea_grid(smaller, ann, 256);
        const AreaEstimate b = logarea_grid(S, ann, 256);
        EXPECT_LE(a.value, b.value + a.error() + b.error());
    }
}

TEST(LogArea, ScaleInvariant)
{
    std::mt19937_64 rng(23);
    for (int i = 0; i < 5; ++i) {
        const RandomRegion S(rng);
        const auto scaled = [&](Complex z) { return S(z / 2.0); };
        const double a = logarea_grid(S, AnnulusSpec(1.0, 10.0), 256).value;
        const double b = logarea_grid(scaled, AnnulusSpec(2.0, 20.0), 256).value;
        EXPECT_NEAR(a, b, 1e-9);
    }
}

TEST(AreaWindow, KnownAreas)
{
    EXPECT_NEAR(area_window([](Complex) { return true; }, WindowSpec(0.0, 1.0, 0.0, 1.0), 64).value, 1.0, 1e-12);
    const AreaEstimate disk = area_window([](Complex z) { return std::abs(z) < 1.0; }, WindowSpec(-1, 1, -1, 1), 512);
    EXPECT_LT(std::abs(disk.value - std::numbers::pi), 0.01 * std::numbers::pi);
}

TEST(DecayProfile, StripAndControl)
{
    const DecayProfile strip = annulus_decay_profile(in_strip, 4, 10, 2048);
    for (std::size_t i = 1; i < strip.ratios.size(); ++i) {
        EXPECT_LT(strip.ratios[i], 1.0);
        EXPECT_LT(strip.ratios[i], strip.ratios[i - 1] + 0.01);
    }
    const DecayProfile all = annulus_decay_profile([](Complex) { return true; }, 0, 5, 64);
    for (const DecayEntry& e : all.entries) {
        EXPECT_NEAR(e.estimate.value, two_pi_v * std::log(2.0), 1e-12);
    }
    for (double r : all.ratios) {
        EXPECT_NEAR(r, 1.0, 1e-12);
    }
    EXPECT_TRUE(std::isinf(all.tail_estimate));
}

TEST(NOfR, ClosedFormsAndBound)
{
    const NrOracle sigma = NrOracle::closed_form(FunctionSpec::sigma(Complex(0.0, 1.0)));
    EXPECT_EQ(n_of_r(sigma, 10.0), 317.0);
    const NrOracle sine = NrOracle::closed_form(FunctionSpec::sine());
    EXPECT_EQ(n_of_r(sine, std::numbers::pi), 3.0);
    const NrOracle bound = NrOracle::bound_3d1(FunctionSpec::sine());
    EXPECT_NEAR(n_of_r(bound, 10.0), std::log(std::sinh(10.0 * std::numbers::e)), 1e-6);
    EXPECT_NEAR(n_of_r(NrOracle::bound_3d1(FunctionSpec::sine(), 2.5), 10.0), n_of_r(bound, 10.0) + 2.5, 1e-12);
    EXPECT_THROW(NrOracle::closed_form(exp_fn()), PreconditionError);
    EXPECT_THROW(n_of_r(sine, 0.5), PreconditionError);
}

TEST(NOfR, LatticeCountMatchesEnumeration)
{
    const Complex tau(0.3, 1.2);
    for (double r : {1.0, 2.5, 7.3, 15.0}) {
        int count = 0;
        for (int n = -40; n <= 40; ++n) {
            for (int m = -40; m <= 40; ++m) {
                if (std::abs(static_cast<double>(m) + static_cast<double>(n) * tau) <= r) {
                    ++count;
                }
            }
        }
        EXPECT_EQ(lattice_count(tau, r), count) << "r = " << r;
    }
}

TEST(NOfR, ExtendedRangeContinuesSmoothly)
{
    const NrOracle sigma = NrOracle::closed_form(FunctionSpec::sigma(Complex(0.0, 1.0)));
    const double r = 2e6;
    EXPECT_NEAR(n_of_r(sigma, ExtReal::from_double(r)).to_double() / (std::numbers::pi * r * r), 1.0, 1e-9);
    const NrOracle sine = NrOracle::closed_form(FunctionSpec::sine());
    EXPECT_NEAR(n_of_r(sine, ExtReal::from_double(1e7)).to_double(), 2e7 / std::numbers::pi + 2.0, 1.0);
}

TEST(ElRatio, ExpPreimageIsHalfPlane)
{
    for (const ElRatio& e : el_ratio(exp_fn(), 1.0, {5.0, 20.0, 80.0}, 256)) {
        EXPECT_NEAR(e.ratio, std::numbers::pi, 0.02) << "r = " << e.r;
    }
}

TEST(ElRatio, SineBoundedAwayFromZeroAndEmptyCase)
{
    for (const ElRatio& e : el_ratio(FunctionSpec::sine(), 10.0, {10.0, 40.0, 160.0}, 256)) {
        EXPECT_GT(e.ratio, 0.1);
    }
    // |exp z| >= e^{-1.2} > 0.3 on |z| <= 1.2
    for (const ElRatio& e : el_ratio(exp_fn(), 0.3, {1.1, 1.2}, 64)) {
        EXPECT_EQ(e.ratio, 0.0);
    }
    EXPECT_THROW(el_ratio(exp_fn(), 1.0, {3.0, 2.0}, 64), PreconditionError);
}
