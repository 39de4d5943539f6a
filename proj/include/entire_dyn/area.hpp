#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "complex_util.hpp"
#include "counter_rng.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

// Area and logarithmic-area estimators for predicate-defined planar sets.
//
// logarea A is the literal integral of dx dy / |z|^2 over A, so a full annulus
// [r1, r2] has logarea 2 pi log(r2 / r1). In log-polar coordinates
// (s, theta) = (log r, arg z) that density is d s d theta, which is why the
// log-polar estimators below weight every cell and sample uniformly.
namespace entire_dyn {

enum class AreaMethod { grid, monte_carlo };

struct AreaEstimate {
    double value = 0.0;
    /// Binomial standard error (Monte Carlo); 0 for grids.
    double std_error = 0.0;
    /// |estimate(resolution) - estimate(resolution / 2)| (grids); 0 for Monte Carlo.
    double grid_delta = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    AreaMethod method = AreaMethod::grid;
    std::int64_t resolution_or_seed = 0;

    /// The error proxy matching the method.
    double error() const { return method == AreaMethod::grid ? grid_delta : std_error; }
};

namespace detail {

template <typename Predicate>
std::uint64_t log_polar_hits(Predicate& pred, const AnnulusSpec& region, int resolution, Parallelism par)
{
    const double log_in = std::log(region.r_inner);
    const double d_log = region.log_width() / resolution;
    const double d_theta = two_pi / resolution;
    return parallel_sum(static_cast<std::size_t>(resolution), par, [&](std::size_t i) {
        const double r = std::exp(log_in + (static_cast<double>(i) + 0.5) * d_log);
        std::uint64_t hits = 0;
        for (int j = 0; j < resolution; ++j) {
            const double theta = -pi + (j + 0.5) * d_theta;
            if (pred(std::polar(r, theta))) {
                ++hits;
            }
        }
        return hits;
    });
}

template <typename Predicate>
std::uint64_t cartesian_hits(Predicate& pred, const WindowSpec& w, int resolution, Parallelism par)
{
    const double dx = (w.x_max - w.x_min) / resolution;
    const double dy = (w.y_max - w.y_min) / resolution;
    return parallel_sum(static_cast<std::size_t>(resolution), par, [&](std::size_t row) {
        const double y = w.y_max - (static_cast<double>(row) + 0.5) * dy;
        std::uint64_t hits = 0;
        for (int col = 0; col < resolution; ++col) {
            if (pred(Complex(w.x_min + (col + 0.5) * dx, y))) {
                ++hits;
            }
        }
        return hits;
    });
}

} // namespace detail

/// Midpoint rule on a resolution x resolution log-polar grid.
template <typename Predicate>
AreaEstimate logarea_grid(Predicate&& pred, const AnnulusSpec& region, int resolution, Parallelism par = {})
{
    if (resolution < 32) {
        throw PreconditionError("logarea_grid: resolution must be at least 32");
    }
    const auto value_at = [&](int res, std::uint64_t& hits) {
        hits = detail::log_polar_hits(pred, region, res, par);
        return static_cast<double>(hits) * (region.log_width() / res) * (two_pi / res);
    };
    AreaEstimate est;
    std::uint64_t coarse_hits = 0;
    est.value = value_at(resolution, est.hits);
    est.grid_delta = std::abs(est.value - value_at(resolution / 2, coarse_hits));
    est.samples = static_cast<std::uint64_t>(resolution) * resolution;
    est.method = AreaMethod::grid;
    est.resolution_or_seed = resolution;
    return est;
}

/// Uniform sampling in (log r, theta); sample i depends only on (seed, i).
template <typename Predicate>
AreaEstimate logarea_monte_carlo(Predicate&& pred, const AnnulusSpec& region, std::uint64_t n, std::uint64_t seed,
                                 Parallelism par = {})
{
    if (n < 1000) {
        throw PreconditionError("logarea_monte_carlo: need at least 1000 samples");
    }
    const double log_in = std::log(region.r_inner);
    const double log_w = region.log_width();
    constexpr std::uint64_t block = 4096;
    const std::uint64_t blocks = (n + block - 1) / block;
    const std::uint64_t hits = parallel_sum(blocks, par, [&](std::size_t b) {
        std::uint64_t h = 0;
        const std::uint64_t end = std::min<std::uint64_t>(n, (b + 1) * block);
        for (std::uint64_t i = b * block; i < end; ++i) {
            const double r = std::exp(log_in + log_w * counter_uniform(seed, i, 0));
            const double theta = -pi + two_pi * counter_uniform(seed, i, 1);
            if (pred(std::polar(r, theta))) {
                ++h;
            }
        }
        return h;
    });
    const double total = two_pi * log_w;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    AreaEstimate est;
    est.value = p * total;
    est.std_error = total * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    est.samples = n;
    est.hits = hits;
    est.method = AreaMethod::monte_carlo;
    est.resolution_or_seed = static_cast<std::int64_t>(seed);
    return est;
}

/// Midpoint rule on a Cartesian grid over the window.
template <typename Predicate>
AreaEstimate area_window(Predicate&& pred, const WindowSpec& window, int resolution, Parallelism par = {})
{
    if (resolution < 32) {
        throw PreconditionError("area_window: resolution must be at least 32");
    }
    const auto value_at = [&](int res, std::uint64_t& hits) {
        hits = detail::cartesian_hits(pred, window, res, par);
        return static_cast<double>(hits) / (static_cast<double>(res) * res) * window.area();
    };
    AreaEstimate est;
    std::uint64_t coarse_hits = 0;
    est.value = value_at(resolution, est.hits);
    est.grid_delta = std::abs(est.value - value_at(resolution / 2, coarse_hits));
    est.samples = static_cast<std::uint64_t>(resolution) * resolution;
    est.method = AreaMethod::grid;
    est.resolution_or_seed = resolution;
    return est;
}

struct DecayEntry {
    int k = 0;
    AreaEstimate estimate;
};

struct DecayProfile {
    std::vector<DecayEntry> entries;
    /// entries[i+1].value / entries[i].value (NaN where the denominator is 0).
    std::vector<double> ratios;
    /// Running sums of the per-annulus values.
    std::vector<double> partial_sums;
    /// Geometric extrapolation of the remaining sum from the last ratio;
    /// +inf when that ratio is >= 1.
    double tail_estimate = 0.0;
};

/// Per-annulus logarea over the dyadic annuli [2^k, 2^{k+1}], k_min <= k <= k_max.
template <typename Predicate>
DecayProfile annulus_decay_profile(Predicate&& pred, int k_min, int k_max, int resolution, Parallelism par = {})
{
    if (!(0 <= k_min && k_min < k_max && k_max <= 40)) {
        throw PreconditionError("annulus_decay_profile: need 0 <= k_min < k_max <= 40");
    }
    DecayProfile prof;
    double running = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const AnnulusSpec ann(std::ldexp(1.0, k), std::ldexp(1.0, k + 1));
        DecayEntry e{k, logarea_grid(pred, ann, resolution, par)};
        running += e.estimate.value;
        prof.partial_sums.push_back(running);
        if (!prof.entries.empty()) {
            const double prev = prof.entries.back().estimate.value;
            prof.ratios.push_back(prev > 0.0 ? e.estimate.value / prev : std::numeric_limits<double>::quiet_NaN());
        }
        prof.entries.push_back(e);
    }
    const double last_ratio = prof.ratios.empty() ? 1.0 : prof.ratios.back();
    if (last_ratio < 1.0) {
        prof.tail_estimate = prof.entries.back().estimate.value * last_ratio / (1.0 - last_ratio);
    } else {
        prof.tail_estimate = std::numeric_limits<double>::infinity();
    }
    return prof;
}

} // namespace entire_dyn
