#include "usct/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "usct/rng.hpp"

namespace usct {

double roi_radius(const PhantomSpec& spec, const Grid2D& grid) {
    return spec.roi_radius_fraction * 0.5 * std::min(grid.extent_x(), grid.extent_y());
}

namespace {

void validate(const PhantomSpec& spec, const Grid2D& grid) {
    if (!(spec.background > 0.0))
        throw ValidationError("phantom: background speed must be positive");
    if (!(spec.roi_radius_fraction > 0.0) || spec.roi_radius_fraction > 1.0)
        throw ValidationError("phantom: roi_radius_fraction must be in (0, 1]");
    if (!(spec.speed_min > 0.0) || !(spec.speed_min < spec.speed_max))
        throw ValidationError("phantom: speed bounds must satisfy 0 < min < max");
    if (spec.background < spec.speed_min || spec.background > spec.speed_max)
        throw ValidationError("phantom: background outside speed bounds");
    const double roi = roi_radius(spec, grid);
    for (const auto& inc : spec.inclusions) {
        if (!(inc.radius > 0.0))
            throw ValidationError("phantom: inclusion radius must be positive");
        if (inc.edge_smoothness < 0.0 || inc.edge_smoothness > inc.radius)
            throw ValidationError("phantom: edge_smoothness must lie in [0, radius]");
        const double d = std::hypot(inc.cx - grid.center_x(), inc.cy - grid.center_y());
        if (d > roi)
            throw ValidationError("phantom: inclusion center outside the ROI disc");
    }
}

// 1 inside the core, cosine roll-off across [radius - w, radius], 0 outside
double taper(double dist, double radius, double w) {
    if (dist >= radius) return 0.0;
    if (dist <= radius - w || w <= 0.0) return 1.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (dist - (radius - w)) / w));
}

}  // namespace

SoundSpeedField generate_phantom(const PhantomSpec& spec, const Grid2D& grid) {
    validate(spec, grid);
    const double roi = roi_radius(spec, grid);
    const double cx = grid.center_x();
    const double cy = grid.center_y();

    SoundSpeedField f(grid, spec.background);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const double y = grid.y(j);
            if (std::hypot(x - cx, y - cy) > roi) continue;  // exact background outside
            double v = spec.background;
            for (const auto& inc : spec.inclusions)
                v += inc.amplitude * taper(std::hypot(x - inc.cx, y - inc.cy),
                                           inc.radius, inc.edge_smoothness);
            f.at(i, j) = std::clamp(v, spec.speed_min, spec.speed_max);
        }
    }
    return f;
}

PhantomSpec random_phantom_spec(std::uint64_t seed, PhantomClass cls, const Grid2D& grid,
                                double roi_radius_fraction) {
    PhantomSpec spec;
    spec.seed = seed;
    spec.roi_radius_fraction = roi_radius_fraction;
    if (cls == PhantomClass::Weak) {
        spec.speed_min = 1470.0;
        spec.speed_max = 1530.0;
    }
    const double roi = roi_radius(spec, grid);
    const double cx = grid.center_x();
    const double cy = grid.center_y();

    // decorrelate the two classes under one seed
    Rng rng(seed * 2u + (cls == PhantomClass::Strong ? 1u : 0u));
    const int n_inclusions = rng.uniform_int(3, 8);
    for (int k = 0; k < n_inclusions; ++k) {
        Inclusion inc;
        const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double rad = rng.uniform(0.0, 0.75) * roi;
        inc.cx = cx + rad * std::cos(ang);
        inc.cy = cy + rad * std::sin(ang);
        inc.radius = rng.uniform(0.15, 0.4) * roi;
        inc.edge_smoothness = rng.uniform(0.4, 0.9) * inc.radius;
        inc.amplitude = (cls == PhantomClass::Strong) ? rng.uniform(-92.0, 95.0)
                                                      : rng.uniform(-30.0, 30.0);
        spec.inclusions.push_back(inc);
    }
    return spec;
}

SoundSpeedField random_phantom(std::uint64_t seed, const Grid2D& grid, PhantomClass cls,
                               double roi_radius_fraction) {
    return generate_phantom(random_phantom_spec(seed, cls, grid, roi_radius_fraction), grid);
}

}  // namespace usct
