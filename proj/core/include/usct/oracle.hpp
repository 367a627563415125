#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "usct/adjoint.hpp"
#include "usct/cbs.hpp"
#include "usct/field.hpp"

// Brute-force references for tests and the gradcheck command. Nothing here
// shares numerical kernels with the solver modules beyond the field-core
// containers: Fourier transforms are explicit DFT sums, the linear solve is
// a dense LU, the Hankel function is series plus asymptotics. Desk-scale
// cost guards keep misuse out.
namespace usct::oracle {

// Dense matrix of (-lap_spectral - diag(k^2)) on the padded periodic grid of
// the same medium the CBS workspace would build, so agreement tests compare
// like with like. Guarded to padded grids of at most ~1200 unknowns.
struct DenseOperator {
    Grid2D grid;  // padded
    int pad = 0;
    std::vector<std::complex<double>> matrix;  // row-major N x N

    std::size_t dim() const { return grid.size(); }
    std::vector<std::complex<double>> apply(std::span<const std::complex<double>> v) const;
};

DenseOperator build_dense_operator(const SoundSpeedField& speed, double omega,
                                   const CbsConfig& config);

// Direct solve of the dense system; ground truth for CBS equivalence.
// Returns the interior (cropped) field.
ComplexField dense_solve(const SoundSpeedField& speed, const SourceTerm& source,
                         double omega, const CbsConfig& config);

// Green's operator application via explicit DFT sums (no FFT), for the
// diagonal-multiplier check on tiny grids.
ComplexField greens_apply_dft(const ComplexField& f, double h, double k0_sq, double epsilon);

// Central finite differences of the data misfit with respect to single nodal
// speed values, normalized by h^2 so the result is directly comparable to
// the adjoint gradient density: (T(X0+e) - T(X0-e)) / (2 fd_step h^2).
std::vector<double> fd_gradient(const SoundSpeedField& speed, const MeasurementMatrix& observed,
                                const TransducerArray& array,
                                std::span<const std::pair<int, int>> nodes, double fd_step,
                                double omega, const CbsConfig& config);

// J0, Y0, H0^(1) for real positive arguments: power series below the
// switchover, Hankel asymptotic expansion above, abs error <= 1e-10 on
// [1e-3, 1e4].
double bessel_j0(double x);
double bessel_y0(double x);
std::complex<double> hankel1_0(double x);

// (i/4) H0^(1)(k0 |r - r_src|), the outgoing free-space solution of
// (lap + k0^2) G = -delta in 2D. Throws on a coincident point.
std::vector<std::complex<double>> analytic_green2d(double k0, double src_x, double src_y,
                                                   std::span<const std::pair<double, double>> eval_points);

// Straightforward double-loop SSIM used to pin down the production
// implementation.
double ssim_reference(const RealField& a, const RealField& b, double data_range);

}  // namespace usct::oracle
