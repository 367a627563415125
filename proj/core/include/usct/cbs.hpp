#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "usct/field.hpp"
#include "usct/geometry.hpp"

namespace usct {

// Solver configuration.
//
// The iteration solves the spectral discretization of
//   lap(Y) + k(r)^2 Y = -rho,   k = omega / c,
// on a padded periodic grid. The pad carries an absorbing layer
//   k^2 -> k^2 + i*alpha(xi),  alpha = absorber_strength * k_bg^2 * xi^absorber_power,
// where xi in [0,1] is the depth into the pad; without it the periodic
// problem has no outgoing-wave character at all (the -i*epsilon shift cancels
// at the fixed point). epsilon is then set to max|k^2 + i*alpha - k0^2| /
// contraction_margin: the margin keeps the preconditioner Q away from zero
// at the outer pad edge, which otherwise stalls high-frequency content
// parked there.
struct CbsConfig {
    double tol = 1e-6;               // relative-update stopping threshold
    int max_iters = 500;
    int pad = -1;                    // nodes per side; -1 = one background wavelength
    double absorber_strength = 2.0;  // alpha_max in units of k_bg^2
    double absorber_power = 2.0;
    double contraction_margin = 0.9; // in (0,1); eps = max|V0| / margin
    double k0_sq = 0.0;              // >0 overrides the midpoint rule
    double epsilon = 0.0;            // >0 overrides the derived epsilon
};

// Midpoint rule from the speed field alone: k0^2 = (min k^2 + max k^2)/2 and
// epsilon = (max k^2 - min k^2)/2 * (1+1e-8), floored at 1e-6*k0^2. This is
// the minimal epsilon satisfying epsilon >= max|k^2 - k0^2|; workspaces
// additionally enlarge epsilon to cover their absorbing layer.
std::pair<double, double> choose_background(const SoundSpeedField& speed, double omega);

// V = (omega/c)^2 - k0_sq - i*epsilon on the field's own grid.
// Throws ValidationError when epsilon < max|k^2 - k0_sq|.
ComplexField scattering_potential(const SoundSpeedField& speed, double omega,
                                  double k0_sq, double epsilon);

// Padded complex squared-wavenumber map: interior (omega/c)^2, pad filled
// with the corner speed value plus the absorbing ramp.
struct PaddedMedium {
    Grid2D grid;       // padded grid
    int pad = 0;
    double fill_speed = 0.0;
    double omega = 0.0;
    double k0_sq = 0.0;
    double epsilon = 0.0;
    std::vector<std::complex<double>> k2;
};

PaddedMedium make_padded_medium(const SoundSpeedField& speed, double omega,
                                const CbsConfig& config);

struct SolveReport {
    int iterations_used = 0;
    double final_rel_update = 0.0;
    bool converged = false;
    long npe_count = 0;  // Green's-operator applications spent on this solve
};

struct CbsSolution {
    ComplexField field;         // interior (pad cropped)
    ComplexField padded_field;  // full solver state, for residual checks
    SolveReport report;
};

class FftPlan2D;

// Precomputed Green's multiplier, scattering potential and preconditioner for
// one sound-speed field. Immutable after construction and safe to share
// across threads; each solve owns its scratch.
class CbsWorkspace {
public:
    CbsWorkspace(const SoundSpeedField& speed, double omega, const CbsConfig& config);
    ~CbsWorkspace();
    CbsWorkspace(const CbsWorkspace&) = delete;
    CbsWorkspace& operator=(const CbsWorkspace&) = delete;

    const PaddedMedium& medium() const { return medium_; }
    const Grid2D& padded_grid() const { return medium_.grid; }
    const CbsConfig& config() const { return config_; }

    // G f = IFFT[ FFT[f] / (|p|^2 - k0^2 - i eps) ] on the padded grid
    ComplexField greens_apply(const ComplexField& f) const;
    // (-lap_spectral - k0^2 - i eps) f, the inverse of greens_apply
    ComplexField shifted_operator_apply(const ComplexField& f) const;

    // Iterates Y <- M Y + Q G rho from Y=0 on the padded grid.
    CbsSolution solve(const SourceTerm& source) const;
    // Same, with an arbitrary interior source field (linearity tests, adjoint
    // solves). `rho_hat` optionally supplies the precomputed forward FFT of
    // the padded source so batches can share it.
    CbsSolution solve_field(const ComplexField& interior_source,
                            const std::vector<std::complex<double>>* rho_hat = nullptr) const;

    std::vector<std::complex<double>> forward_fft_padded(const ComplexField& interior_source) const;

private:
    CbsConfig config_;
    PaddedMedium medium_;
    std::vector<std::complex<double>> greens_mult_;  // over padded Fourier grid
    std::vector<std::complex<double>> potential_;    // V
    std::vector<std::complex<double>> precond_;      // Q = i V / epsilon
    std::unique_ptr<FftPlan2D> fft_;
};

CbsSolution cbs_solve(const SoundSpeedField& speed, const SourceTerm& source,
                      double omega, const CbsConfig& config);

struct BcbsOptions {
    int threads = 1;
    std::size_t memory_budget_mb = 512;  // caps pairs in flight; result-invariant
};

// All (speed, source) pairs share per-speed workspaces and per-source FFTs.
// Each pair iterates to its own stopping point, so results match cbs_solve
// bitwise pair by pair; solutions[i*n_sources + n] is speed i, source n.
struct BcbsResult {
    std::vector<CbsSolution> solutions;
    int n_speeds = 0;
    int n_sources = 0;

    const CbsSolution& at(int i, int n) const {
        return solutions[static_cast<std::size_t>(i) * n_sources + n];
    }
    bool all_converged() const;
};

BcbsResult bcbs_solve(std::span<const SoundSpeedField> speeds,
                      std::span<const SourceTerm> sources, double omega,
                      const CbsConfig& config, const BcbsOptions& options = {});

// || lap_spectral(Y) + k^2 Y + rho ||_2 / ||rho||_2 with real k^2 = (omega/c)^2,
// restricted to nodes at least `interior_margin` from every edge. All three
// fields share one grid (pass the padded solver state for solver checks).
// Defined as 0 when both Y and rho vanish. exclude_node skips one grid node
// (the source's own cell) from the numerator.
double residual_check(const SoundSpeedField& speed, const ComplexField& wavefield,
                      const ComplexField& source, double omega, int interior_margin = 0,
                      std::optional<std::pair<int, int>> exclude_node = std::nullopt);

// residual_check of a solution against the medium it was solved on.
double solution_residual(const CbsSolution& sol, const SoundSpeedField& speed,
                         const SourceTerm& source, double omega, const CbsConfig& config,
                         bool exclude_source_node = true);

// Per-source forward simulation: column n holds the receiver samples of the
// wavefield excited by source n. Throws nothing on non-convergence; the
// reports carry per-source status.
struct SimulationResult {
    MeasurementMatrix matrix;
    std::vector<SolveReport> reports;
};

SimulationResult forward_simulate(const SoundSpeedField& speed, const TransducerArray& array,
                                  double omega, const CbsConfig& config,
                                  const BcbsOptions& options = {});

}  // namespace usct
