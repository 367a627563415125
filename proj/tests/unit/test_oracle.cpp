#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "usct/cbs.hpp"
#include "usct/geometry.hpp"
#include "usct/oracle.hpp"
#include "usct/phantom.hpp"
#include "usct/rng.hpp"

using namespace usct;
namespace orc = usct::oracle;

namespace {
constexpr double kOmega = 2.0 * std::numbers::pi * 5.0e5;
}

TEST_CASE("bessel J0/Y0 against frozen reference values") {
    // scipy 1.15.3
    struct Row { double x, j0, y0; };
    const Row rows[] = {
        {0.001, 0.9999997500000155, -4.471416611375923},
        {0.05, 0.9993750976494685, -1.9793110008172097},
        {0.3, 0.9776262465382961, -0.8072735778045195},
        {1.0, 0.7651976865579665, 0.08825696421567697},
        {2.404825557695773, -9.586882554916807e-17, 0.5099243834484792},
        {4.0, -0.3971498098638473, -0.016940739325064846},
        {7.5, 0.2663396578803784, 0.11731328614820863},
        {11.0, -0.17119030040719624, -0.16884732389207938},
        {11.999, 0.04746583057345688, -0.2252943016005962},
        {12.001, 0.04791272471031469, -0.22518010318909973},
        {13.0, 0.2069261023770678, -0.07820786452787612},
        {20.0, 0.16702466434058322, 0.06264059680938369},
        {33.0, 0.0972706722355092, 0.09913482552087971},
        {50.0, 0.055812327669252086, -0.09806499547007692},
        {120.0, 0.07182341582915616, -0.012104365410016011},
        {300.0, -0.033298554876306494, -0.03183188973000254},
        {1000.0, 0.02478668615242003, 0.004715917977623586},
    };
    for (const auto& r : rows) {
        CAPTURE(r.x);
        CHECK(std::abs(orc::bessel_j0(r.x) - r.j0) < 1e-10);
        CHECK(std::abs(orc::bessel_y0(r.x) - r.y0) < 1e-10);
    }
}

TEST_CASE("hankel asymptotic magnitude decays like 1/sqrt(k0 d)") {
    const double mag = std::abs(orc::hankel1_0(50.0));
    const double expected = std::sqrt(2.0 / (std::numbers::pi * 50.0));
    CHECK(std::abs(mag - expected) / expected < 0.01);
}

TEST_CASE("hankel small-argument imaginary part grows logarithmically") {
    // Y0(x) ~ (2/pi) ln(x) for small x: successive decades step by (2/pi) ln 10
    const double y1 = orc::hankel1_0(1e-3).imag();
    const double y2 = orc::hankel1_0(1e-4).imag();
    CHECK(std::abs((y1 - y2) - 2.0 / std::numbers::pi * std::log(10.0)) < 1e-5);
}

TEST_CASE("analytic green is radially symmetric and rejects coincident points") {
    const double k0 = 2094.4;
    const std::vector<std::pair<double, double>> pts = {{0.01, 0.0}, {0.0, 0.01}, {-0.01, 0.0}};
    const auto vals = orc::analytic_green2d(k0, 0.0, 0.0, pts);
    CHECK(vals[0] == vals[1]);
    CHECK(vals[0] == vals[2]);

    const std::vector<std::pair<double, double>> bad = {{0.0, 0.0}};
    CHECK_THROWS_AS(orc::analytic_green2d(k0, 0.0, 0.0, bad), ValidationError);
}

TEST_CASE("dense operator agrees with the FFT-based operator application") {
    const Grid2D grid = make_centered_grid(12, 12, 5.0e-4);
    const SoundSpeedField speed = random_phantom(3, grid, PhantomClass::Strong);
    CbsConfig cfg;
    cfg.pad = 3;

    const orc::DenseOperator op = orc::build_dense_operator(speed, kOmega, cfg);
    CbsWorkspace ws(speed, kOmega, cfg);
    REQUIRE(op.grid == ws.padded_grid());

    // A v == (-lap - k0^2 - i eps) v - (k^2 - k0^2 - i eps) v via the solver's
    // own FFT path, checked on random vectors
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        ComplexField v(op.grid);
        for (auto& z : v.values) z = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto dense = op.apply(v.values);

        const ComplexField shifted = ws.shifted_operator_apply(v);
        const auto& med = ws.medium();
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < dense.size(); ++k) {
            const std::complex<double> vk =
                shifted.values[k] -
                (med.k2[k] - std::complex<double>(med.k0_sq, med.epsilon)) * v.values[k];
            num += std::norm(dense[k] - vk);
            den += std::norm(vk);
        }
        CHECK(std::sqrt(num / den) < 1e-12);
    }
}

TEST_CASE("dense solve: zero source, linearity") {
    const Grid2D grid = make_centered_grid(12, 12, 5.0e-4);
    const SoundSpeedField speed = random_phantom(5, grid, PhantomClass::Weak);
    CbsConfig cfg;
    cfg.pad = 3;
    const TransducerArray array = build_array(full_ring(4), 0.9 * grid.extent_x());

    SourceTerm zero = make_source(array, 0, grid);
    for (auto& v : zero.field.values) v = 0.0;
    const ComplexField y0 = orc::dense_solve(speed, zero, kOmega, cfg);
    for (const auto& v : y0.values) CHECK(std::abs(v) == 0.0);

    const SourceTerm s1 = make_source(array, 0, grid);
    const SourceTerm s2 = make_source(array, 1, grid);
    SourceTerm combo = s1;
    for (std::size_t k = 0; k < combo.field.values.size(); ++k)
        combo.field.values[k] = 2.0 * s1.field.values[k] + 3.0 * s2.field.values[k];

    const ComplexField ya = orc::dense_solve(speed, s1, kOmega, cfg);
    const ComplexField yb = orc::dense_solve(speed, s2, kOmega, cfg);
    const ComplexField yc = orc::dense_solve(speed, combo, kOmega, cfg);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < yc.values.size(); ++k) {
        num += std::norm(yc.values[k] - (2.0 * ya.values[k] + 3.0 * yb.values[k]));
        den += std::norm(yc.values[k]);
    }
    CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("dense operator rejects oversized grids") {
    const Grid2D grid = make_centered_grid(40, 40, 5.0e-4);
    const SoundSpeedField speed(grid, 1500.0);
    CHECK_THROWS_AS(orc::build_dense_operator(speed, kOmega, CbsConfig{}), ValidationError);
}

TEST_CASE("ssim reference is 1 for identical fields") {
    const Grid2D grid = make_centered_grid(16, 16, 1.0);
    RealField f(grid);
    Rng rng(3);
    for (auto& v : f.values) v = rng.uniform(0.0, 1.0);
    CHECK(orc::ssim_reference(f, f, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}
