#pragma once

#include <optional>
#include <span>
#include <vector>

#include "usct/cbs.hpp"
#include "usct/field.hpp"
#include "usct/geometry.hpp"

namespace usct {

struct ObjectiveValue {
    double value = 0.0;                 // sum over |residual|^2
    MeasurementMatrix residual_matrix;  // predicted - observed, kept for the gradient
};

// T = sum_{m,n} |predicted[m,n] - observed[m,n]|^2
ObjectiveValue objective(const MeasurementMatrix& predicted, const MeasurementMatrix& observed);

// Adjoint fields assembled from forward solutions, no adjoint PDE solve:
//   Lambda_n(r) = -sum_m conj(residual[m,n]) * Y_m(r).
// Requires the wavefields of every transducer index (co-located arrays make
// {Y_m} the same family as {Y_n}).
std::vector<ComplexField> adjoint_fields(std::span<const ComplexField> wavefields,
                                         const MeasurementMatrix& residual);

// Zero outside a disc; used to confine updates to the region where the
// medium is unknown.
struct RoiMask {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
};

// Misfit gradient as a density per unit sound speed:
//   g(r) = (4 omega^2 / X0(r)^3) * Re[ sum_n Lambda_n(r) Y_n(r) ]
//        = -(4 omega^2 / X0^3) * Re[ sum_{m,n} conj(res_mn) Y_m(r) Y_n(r) ].
// The derivative of the objective with respect to one nodal value is
// h^2 * g at that node; the finite-difference oracle is the arbiter for the
// sign, the conjugation and the factor. Identically zero when the residual
// matrix is zero.
RealField gradient(const SoundSpeedField& speed, std::span<const ComplexField> wavefields,
                   const MeasurementMatrix& residual, double omega,
                   const std::optional<RoiMask>& mask = std::nullopt);

struct EvalOptions {
    std::optional<RoiMask> mask;
    BcbsOptions solver;
};

// One batched forward solve over all sources (exactly 1 NPE), then
// objective, adjoint combination and gradient.
struct EvalResult {
    ObjectiveValue objective;
    RealField gradient;
    std::vector<SolveReport> reports;
    int npe = 1;
    bool all_converged = true;
};

EvalResult objective_and_gradient(const SoundSpeedField& speed,
                                  const MeasurementMatrix& observed,
                                  const TransducerArray& array, const CbsConfig& config,
                                  const EvalOptions& options = {});

}  // namespace usct
