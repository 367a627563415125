#include "usct/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "usct/errors.hpp"
#include "usct/rng.hpp"

namespace usct {

ViewConfig full_ring(int count) { return ViewConfig{ViewKind::FullRing, count, 1.0, 0.0}; }
ViewConfig sparse_ring(int count) { return ViewConfig{ViewKind::SparseRing, count, 1.0, 0.0}; }
ViewConfig partial_arc(int count, double arc_fraction, double facing_angle) {
    return ViewConfig{ViewKind::PartialArc, count, arc_fraction, facing_angle};
}

TransducerArray build_array(const ViewConfig& view, double ring_diameter, double center_x,
                            double center_y) {
    if (view.count < 1) throw ValidationError("build_array: count must be >= 1");
    if (!(ring_diameter > 0.0)) throw ValidationError("build_array: ring diameter must be positive");
    if (view.kind == ViewKind::PartialArc &&
        (!(view.arc_fraction > 0.0) || view.arc_fraction > 1.0))
        throw ValidationError("build_array: arc_fraction must be in (0, 1]");

    TransducerArray arr;
    arr.ring_radius = ring_diameter / 2.0;
    arr.center_x = center_x;
    arr.center_y = center_y;
    arr.view = view;
    arr.positions.reserve(view.count);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < view.count; ++k) {
        double theta = 0.0;
        if (view.kind == ViewKind::PartialArc) {
            // midpoint rule across the arc span, centered on facing_angle
            const double span = view.arc_fraction * two_pi;
            theta = view.facing_angle - span / 2.0 + span * (k + 0.5) / view.count;
        } else {
            theta = two_pi * k / view.count;
        }
        arr.positions.emplace_back(center_x + arr.ring_radius * std::cos(theta),
                                   center_y + arr.ring_radius * std::sin(theta));
    }
    return arr;
}

SourceTerm make_source(const TransducerArray& array, int n, const Grid2D& grid) {
    if (n < 0 || n >= array.count())
        throw ValidationError("make_source: source index out of range");
    const auto [x, y] = array.positions[n];
    SourceTerm src;
    src.field = ComplexField(grid);
    const BilinearStencil s = bilinear_stencil(grid, x, y);  // throws if outside extent
    const double scale = 1.0 / (grid.h * grid.h);
    src.field.at(s.i0, s.j0) += s.w00 * scale;
    src.field.at(s.i0 + 1, s.j0) += s.w10 * scale;
    src.field.at(s.i0, s.j0 + 1) += s.w01 * scale;
    src.field.at(s.i0 + 1, s.j0 + 1) += s.w11 * scale;
    src.source_index = n;
    src.nominal_x = x;
    src.nominal_y = y;
    return src;
}

std::vector<std::complex<double>> sample_receivers(const ComplexField& wavefield,
                                                   const TransducerArray& array) {
    std::vector<std::complex<double>> out;
    out.reserve(array.positions.size());
    for (const auto& [x, y] : array.positions)
        out.push_back(bilinear_sample(wavefield, x, y));
    return out;
}

MeasurementMatrix add_noise(const MeasurementMatrix& clean, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) return clean;
    double power = 0.0;
    for (const auto& v : clean.values) power += std::norm(v);
    if (clean.values.empty() || power == 0.0) return clean;
    power /= static_cast<double>(clean.values.size());

    const double sigma_sq = power / std::pow(10.0, snr_db / 10.0);
    const double s = std::sqrt(sigma_sq / 2.0);
    MeasurementMatrix noisy = clean;
    noisy.snr_db = snr_db;
    Rng rng(seed);
    for (auto& v : noisy.values) {
        double g1 = 0.0, g2 = 0.0;
        rng.gauss(g1, g2);
        v += std::complex<double>(s * g1, s * g2);
    }
    return noisy;
}

double empirical_snr_db(const MeasurementMatrix& clean, const MeasurementMatrix& noisy) {
    if (clean.values.size() != noisy.values.size())
        throw ValidationError("empirical_snr_db: size mismatch");
    double sig = 0.0, noise = 0.0;
    for (std::size_t k = 0; k < clean.values.size(); ++k) {
        sig += std::norm(clean.values[k]);
        noise += std::norm(noisy.values[k] - clean.values[k]);
    }
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig / noise);
}

}  // namespace usct
