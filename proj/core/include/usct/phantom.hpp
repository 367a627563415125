#pragma once

#include <cstdint>
#include <vector>

#include "usct/field.hpp"

namespace usct {

// One smooth disc perturbation: full amplitude inside radius - edge_smoothness,
// cosine roll-off to zero at radius. edge_smoothness must lie in [0, radius]
// so the taper is exactly 1 at the center.
struct Inclusion {
    double cx = 0.0;              // [m]
    double cy = 0.0;              // [m]
    double radius = 0.0;          // [m]
    double amplitude = 0.0;       // m/s offset added to the background
    double edge_smoothness = 0.0; // [m] taper width
};

struct PhantomSpec {
    double background = 1500.0;                  // m/s
    double roi_radius_fraction = 0.782;          // of half the min grid extent
    std::vector<Inclusion> inclusions;
    std::uint64_t seed = 0;                      // echoed into sidecars
    double speed_min = 1408.0;                   // clamp bounds, m/s
    double speed_max = 1595.0;
};

enum class PhantomClass { Weak, Strong };

// Background outside the ROI disc (centered on the grid center), clamped
// superposition of the inclusion tapers inside. Deterministic.
// Throws ValidationError when bounds or inclusion geometry are inconsistent.
SoundSpeedField generate_phantom(const PhantomSpec& spec, const Grid2D& grid);

// Seeded random spec: 3..8 inclusions with centers in the ROI disc.
// Weak class draws amplitudes in [-30, 30] m/s and clamps to 1500 +- 30;
// strong class draws [-92, 95] and clamps to [1408, 1595].
PhantomSpec random_phantom_spec(std::uint64_t seed, PhantomClass cls,
                                const Grid2D& grid,
                                double roi_radius_fraction = 0.782);

SoundSpeedField random_phantom(std::uint64_t seed, const Grid2D& grid, PhantomClass cls,
                               double roi_radius_fraction = 0.782);

// ROI disc radius implied by a spec on a grid, in meters.
double roi_radius(const PhantomSpec& spec, const Grid2D& grid);

}  // namespace usct
