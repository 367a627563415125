#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usct/field.hpp"

namespace usct {

enum class ViewKind { FullRing, SparseRing, PartialArc };

struct ViewConfig {
    ViewKind kind = ViewKind::FullRing;
    int count = 16;
    double arc_fraction = 1.0;   // of the full circle; used by PartialArc
    double facing_angle = 0.0;   // arc center [rad]; used by PartialArc
};

ViewConfig full_ring(int count);
ViewConfig sparse_ring(int count);
ViewConfig partial_arc(int count, double arc_fraction, double facing_angle = 0.0);

// Co-located sources and receivers on a ring. positions[k] is both source k
// and receiver k.
struct TransducerArray {
    std::vector<std::pair<double, double>> positions;
    double ring_radius = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;
    ViewConfig view;

    int count() const { return static_cast<int>(positions.size()); }
};

// FullRing/SparseRing place count points at angles 2*pi*k/count; PartialArc
// spreads count points over arc_fraction of the circle centered on
// facing_angle (midpoint rule, so endpoints never coincide).
TransducerArray build_array(const ViewConfig& view, double ring_diameter,
                            double center_x = 0.0, double center_y = 0.0);

// Discrete point source: the unit-mass Dirac splat at the transducer's exact
// position, i.e. the bilinear weights of that position scaled by 1/h^2. The
// discrete integral sum(rho)*h^2 is exactly 1. Sharing the receiver stencil
// keeps the forward map symmetric (see field.hpp).
struct SourceTerm {
    ComplexField field;
    int source_index = -1;
    double nominal_x = 0.0;
    double nominal_y = 0.0;
};

SourceTerm make_source(const TransducerArray& array, int n, const Grid2D& grid);

// entry m = bilinear_sample(wavefield, positions[m])
std::vector<std::complex<double>> sample_receivers(const ComplexField& wavefield,
                                                   const TransducerArray& array);

// Receiver samples per source: values[m*cols + n] = receiver m of source n.
struct MeasurementMatrix {
    int rows = 0;  // receivers M
    int cols = 0;  // sources N
    std::vector<std::complex<double>> values;
    double omega = 0.0;                  // rad/s
    std::optional<double> snr_db;        // empty = noise-free

    std::complex<double>& at(int m, int n) { return values[static_cast<std::size_t>(m) * cols + n]; }
    const std::complex<double>& at(int m, int n) const { return values[static_cast<std::size_t>(m) * cols + n]; }
};

// i.i.d. circular complex Gaussian noise with variance
// sigma^2 = mean(|y|^2) / 10^(snr_db/10) over the whole matrix.
// A non-finite snr_db returns the input unchanged.
MeasurementMatrix add_noise(const MeasurementMatrix& clean, double snr_db, std::uint64_t seed);

// empirical 10*log10(P_signal / P_noise) of a noisy/clean pair
double empirical_snr_db(const MeasurementMatrix& clean, const MeasurementMatrix& noisy);

}  // namespace usct
