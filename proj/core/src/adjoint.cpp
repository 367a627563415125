#include "usct/adjoint.hpp"

#include <cmath>
#include <string>

#include "usct/errors.hpp"

namespace usct {

ObjectiveValue objective(const MeasurementMatrix& predicted, const MeasurementMatrix& observed) {
    if (predicted.rows != observed.rows || predicted.cols != observed.cols)
        throw ValidationError("objective: measurement dimensions differ");
    if (predicted.omega != observed.omega)
        throw ValidationError("objective: omega differs between matrices");

    ObjectiveValue out;
    out.residual_matrix = predicted;
    out.residual_matrix.snr_db.reset();
    double sum = 0.0;
    for (std::size_t k = 0; k < predicted.values.size(); ++k) {
        const std::complex<double> r = predicted.values[k] - observed.values[k];
        out.residual_matrix.values[k] = r;
        sum += std::norm(r);
    }
    out.value = sum;
    return out;
}

std::vector<ComplexField> adjoint_fields(std::span<const ComplexField> wavefields,
                                         const MeasurementMatrix& residual) {
    if (static_cast<int>(wavefields.size()) != residual.rows)
        throw ValidationError("adjoint_fields: need a wavefield for every transducer index, got " +
                              std::to_string(wavefields.size()) + " of " +
                              std::to_string(residual.rows));
    const Grid2D& g = wavefields.empty() ? Grid2D{} : wavefields[0].grid;

    std::vector<ComplexField> lambdas;
    lambdas.reserve(residual.cols);
    for (int n = 0; n < residual.cols; ++n) {
        ComplexField lam(g);
        for (int m = 0; m < residual.rows; ++m) {
            const std::complex<double> w = -std::conj(residual.at(m, n));
            if (w == std::complex<double>(0.0, 0.0)) continue;
            const auto& ym = wavefields[m].values;
            for (std::size_t idx = 0; idx < lam.values.size(); ++idx)
                lam.values[idx] += w * ym[idx];
        }
        lambdas.push_back(std::move(lam));
    }
    return lambdas;
}

RealField gradient(const SoundSpeedField& speed, std::span<const ComplexField> wavefields,
                   const MeasurementMatrix& residual, double omega,
                   const std::optional<RoiMask>& mask) {
    const auto lambdas = adjoint_fields(wavefields, residual);

    RealField g(speed.grid, 0.0);
    std::vector<std::complex<double>> acc(speed.grid.size(), {0.0, 0.0});
    for (int n = 0; n < residual.cols; ++n) {
        const auto& lam = lambdas[n].values;
        const auto& yn = wavefields[n].values;
        for (std::size_t idx = 0; idx < acc.size(); ++idx) acc[idx] += lam[idx] * yn[idx];
    }
    const double scale = 4.0 * omega * omega;
    for (std::size_t idx = 0; idx < acc.size(); ++idx) {
        const double x0 = speed.values[idx];
        g.values[idx] = scale / (x0 * x0 * x0) * acc[idx].real();
    }
    if (mask) {
        for (int j = 0; j < g.grid.ny; ++j)
            for (int i = 0; i < g.grid.nx; ++i)
                if (std::hypot(g.grid.x(i) - mask->cx, g.grid.y(j) - mask->cy) > mask->radius)
                    g.at(i, j) = 0.0;
    }
    return g;
}

EvalResult objective_and_gradient(const SoundSpeedField& speed, const MeasurementMatrix& observed,
                                  const TransducerArray& array, const CbsConfig& config,
                                  const EvalOptions& options) {
    if (observed.rows != array.count() || observed.cols != array.count())
        throw ValidationError("objective_and_gradient: observed matrix does not match the array");

    // one batched forward solve; its solutions double as the {Y_m} family in
    // the adjoint combination because sources and receivers are co-located
    std::vector<SourceTerm> sources;
    sources.reserve(array.count());
    for (int n = 0; n < array.count(); ++n) sources.push_back(make_source(array, n, speed.grid));
    const BcbsResult batch =
        bcbs_solve(std::span(&speed, 1), sources, observed.omega, config, options.solver);

    MeasurementMatrix predicted;
    predicted.rows = array.count();
    predicted.cols = array.count();
    predicted.omega = observed.omega;
    predicted.values.assign(static_cast<std::size_t>(array.count()) * array.count(), {0.0, 0.0});

    std::vector<ComplexField> wavefields;
    wavefields.reserve(array.count());
    EvalResult out;
    for (int n = 0; n < array.count(); ++n) {
        const CbsSolution& sol = batch.at(0, n);
        const auto samples = sample_receivers(sol.field, array);
        for (int m = 0; m < array.count(); ++m) predicted.at(m, n) = samples[m];
        out.reports.push_back(sol.report);
        out.all_converged = out.all_converged && sol.report.converged;
        wavefields.push_back(batch.solutions[n].field);
    }

    out.objective = objective(predicted, observed);
    out.gradient = gradient(speed, wavefields, out.objective.residual_matrix, observed.omega,
                            options.mask);
    out.npe = 1;
    return out;
}

}  // namespace usct
