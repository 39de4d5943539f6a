#pragma once

#include <cmath>

#include "errors.hpp"

namespace entire_dyn {

/// Closed annulus r_inner <= |z| <= r_outer with 1 <= r_inner < r_outer.
struct AnnulusSpec {
    double r_inner = 1.0;
    double r_outer = 2.0;

    AnnulusSpec() = default;
    AnnulusSpec(double inner, double outer) : r_inner(inner), r_outer(outer)
    {
        if (!(inner >= 1.0) || !(outer > inner) || !std::isfinite(outer)) {
            throw PreconditionError("AnnulusSpec: need 1 <= r_inner < r_outer < inf");
        }
    }

    double log_width() const { return std::log(r_outer / r_inner); }
};

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct WindowSpec {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    WindowSpec() = default;
    WindowSpec(double x0, double x1, double y0, double y1) : x_min(x0), x_max(x1), y_min(y0), y_max(y1)
    {
        if (!(x0 < x1) || !(y0 < y1) || !std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0)
            || !std::isfinite(y1)) {
            throw PreconditionError("WindowSpec: need x_min < x_max and y_min < y_max");
        }
    }

    double area() const { return (x_max - x_min) * (y_max - y_min); }
};

} // namespace entire_dyn
