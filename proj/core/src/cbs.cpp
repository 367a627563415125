#include "usct/cbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "fft_plan.hpp"
#include "usct/errors.hpp"

namespace usct {

namespace {

constexpr double kEpsilonFloorFraction = 1e-6;

// angular spatial frequencies of the length-n DFT over spacing h,
// fftfreq layout: 0, 1, ..., n/2-1, -n/2, ..., -1 (times 2*pi/(n*h))
std::vector<double> angular_freqs(int n, double h) {
    std::vector<double> p(n);
    const double base = 2.0 * std::numbers::pi / (n * h);
    for (int k = 0; k < n; ++k) p[k] = base * (k < (n + 1) / 2 ? k : k - n);
    return p;
}

void validate_config(const CbsConfig& c) {
    if (c.max_iters < 1) throw ValidationError("cbs: max_iters must be >= 1");
    if (c.tol < 0.0) throw ValidationError("cbs: tol must be >= 0");
    if (!(c.contraction_margin > 0.0) || c.contraction_margin >= 1.0)
        throw ValidationError("cbs: contraction_margin must be in (0, 1)");
    if (c.absorber_strength < 0.0 || c.absorber_power < 0.0)
        throw ValidationError("cbs: absorber parameters must be >= 0");
}

void validate_speed(const SoundSpeedField& speed) {
    for (double v : speed.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("cbs: sound speed must be finite and positive everywhere");
}

int resolve_pad(const CbsConfig& c, const SoundSpeedField& speed, double omega) {
    if (c.pad >= 0) return c.pad;
    const double fill = speed.values.front();
    const double lambda = 2.0 * std::numbers::pi * fill / omega;
    return static_cast<int>(std::ceil(lambda / speed.grid.h));
}

}  // namespace

std::pair<double, double> choose_background(const SoundSpeedField& speed, double omega) {
    validate_speed(speed);
    double k2_min = std::numeric_limits<double>::max();
    double k2_max = std::numeric_limits<double>::lowest();
    for (double c : speed.values) {
        const double k2 = (omega / c) * (omega / c);
        k2_min = std::min(k2_min, k2);
        k2_max = std::max(k2_max, k2);
    }
    const double k0_sq = 0.5 * (k2_min + k2_max);
    double epsilon = 0.5 * (k2_max - k2_min) * (1.0 + 1e-8);
    epsilon = std::max(epsilon, kEpsilonFloorFraction * k0_sq);
    return {k0_sq, epsilon};
}

ComplexField scattering_potential(const SoundSpeedField& speed, double omega, double k0_sq,
                                  double epsilon) {
    validate_speed(speed);
    ComplexField v(speed.grid);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < speed.values.size(); ++idx) {
        const double k2 = (omega / speed.values[idx]) * (omega / speed.values[idx]);
        worst = std::max(worst, std::abs(k2 - k0_sq));
        v.values[idx] = std::complex<double>(k2 - k0_sq, -epsilon);
    }
    if (worst > epsilon)
        throw ValidationError("scattering_potential: epsilon " + std::to_string(epsilon) +
                              " below max|k^2 - k0^2| = " + std::to_string(worst));
    return v;
}

PaddedMedium make_padded_medium(const SoundSpeedField& speed, double omega,
                                const CbsConfig& config) {
    validate_config(config);
    validate_speed(speed);
    if (!(omega > 0.0)) throw ValidationError("cbs: omega must be positive");

    const int pad = resolve_pad(config, speed, omega);
    const double fill = speed.values.front();  // corner value; constant outside the ROI
    const SoundSpeedField padded = pad_field(speed, pad, fill);

    PaddedMedium m;
    m.grid = padded.grid;
    m.pad = pad;
    m.fill_speed = fill;
    m.omega = omega;
    m.k2.resize(padded.grid.size());

    const double k_bg_sq = (omega / fill) * (omega / fill);
    const double alpha_max = config.absorber_strength * k_bg_sq;
    const int nx = padded.grid.nx;
    const int ny = padded.grid.ny;
    double k2_min = std::numeric_limits<double>::max();
    double k2_max = std::numeric_limits<double>::lowest();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = padded.at(i, j);
            const double k2 = (omega / c) * (omega / c);
            k2_min = std::min(k2_min, k2);
            k2_max = std::max(k2_max, k2);
            double alpha = 0.0;
            if (pad > 0) {
                const int dx = std::max({0, pad - i, i - (pad + speed.grid.nx - 1)});
                const int dy = std::max({0, pad - j, j - (pad + speed.grid.ny - 1)});
                const double xi = static_cast<double>(std::max(dx, dy)) / pad;
                if (xi > 0.0) alpha = alpha_max * std::pow(xi, config.absorber_power);
            }
            m.k2[static_cast<std::size_t>(j) * nx + i] = std::complex<double>(k2, alpha);
        }
    }

    m.k0_sq = config.k0_sq > 0.0 ? config.k0_sq : 0.5 * (k2_min + k2_max);
    if (config.epsilon > 0.0) {
        m.epsilon = config.epsilon;
    } else {
        double v0_max = 0.0;
        for (const auto& k2 : m.k2) v0_max = std::max(v0_max, std::abs(k2 - m.k0_sq));
        m.epsilon = std::max(v0_max / config.contraction_margin,
                             kEpsilonFloorFraction * m.k0_sq);
    }
    return m;
}

CbsWorkspace::CbsWorkspace(const SoundSpeedField& speed, double omega, const CbsConfig& config)
    : config_(config), medium_(make_padded_medium(speed, omega, config)) {
    config_.pad = medium_.pad;
    const Grid2D& g = medium_.grid;
    const auto px = angular_freqs(g.nx, g.h);
    const auto py = angular_freqs(g.ny, g.h);

    greens_mult_.resize(g.size());
    potential_.resize(g.size());
    precond_.resize(g.size());
    const std::complex<double> shift(medium_.k0_sq, medium_.epsilon);
    for (int j = 0; j < g.ny; ++j) {
        const double py2 = py[j] * py[j];
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * g.nx + i;
            greens_mult_[idx] = 1.0 / (px[i] * px[i] + py2 - shift);
            const std::complex<double> v = medium_.k2[idx] - shift;
            potential_[idx] = v;
            precond_[idx] = std::complex<double>(0.0, 1.0 / medium_.epsilon) * v;
        }
    }
    fft_ = std::make_unique<FftPlan2D>(g.nx, g.ny);
}

CbsWorkspace::~CbsWorkspace() = default;

namespace {

void expect_padded(const Grid2D& have, const Grid2D& want, const char* who) {
    if (!(have == want)) throw ValidationError(std::string(who) + ": field must live on the padded grid");
}

}  // namespace

ComplexField CbsWorkspace::greens_apply(const ComplexField& f) const {
    expect_padded(f.grid, medium_.grid, "greens_apply");
    ComplexField out(medium_.grid);
    std::vector<std::complex<double>> hat(f.values.size());
    fft_->forward(f.values.data(), hat.data());
    for (std::size_t idx = 0; idx < hat.size(); ++idx) hat[idx] *= greens_mult_[idx];
    fft_->inverse(hat.data(), out.values.data());
    const double inv_n = 1.0 / static_cast<double>(f.values.size());
    for (auto& v : out.values) v *= inv_n;
    return out;
}

ComplexField CbsWorkspace::shifted_operator_apply(const ComplexField& f) const {
    expect_padded(f.grid, medium_.grid, "shifted_operator_apply");
    const Grid2D& g = medium_.grid;
    const auto px = angular_freqs(g.nx, g.h);
    const auto py = angular_freqs(g.ny, g.h);
    ComplexField out(g);
    std::vector<std::complex<double>> hat(f.values.size());
    fft_->forward(f.values.data(), hat.data());
    const std::complex<double> shift(medium_.k0_sq, medium_.epsilon);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * g.nx + i;
            hat[idx] *= px[i] * px[i] + py[j] * py[j] - shift;
        }
    fft_->inverse(hat.data(), out.values.data());
    const double inv_n = 1.0 / static_cast<double>(f.values.size());
    for (auto& v : out.values) v *= inv_n;
    return out;
}

std::vector<std::complex<double>> CbsWorkspace::forward_fft_padded(
    const ComplexField& interior_source) const {
    const ComplexField padded =
        pad_field(interior_source, medium_.pad, std::complex<double>(0.0, 0.0));
    expect_padded(padded.grid, medium_.grid, "forward_fft_padded");
    std::vector<std::complex<double>> hat(padded.values.size());
    fft_->forward(padded.values.data(), hat.data());
    return hat;
}

CbsSolution CbsWorkspace::solve_field(const ComplexField& interior_source,
                                      const std::vector<std::complex<double>>* rho_hat) const {
    const Grid2D& g = medium_.grid;
    const std::size_t n = g.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    // b = Q G rho  (counts as the first Green's application)
    std::vector<std::complex<double>> hat;
    if (rho_hat) {
        hat = *rho_hat;
    } else {
        hat = forward_fft_padded(interior_source);
    }
    std::vector<std::complex<double>> b(n), y(n, {0.0, 0.0}), t(n), gbuf(n);
    for (std::size_t idx = 0; idx < n; ++idx) hat[idx] *= greens_mult_[idx];
    fft_->inverse(hat.data(), b.data());
    for (std::size_t idx = 0; idx < n; ++idx) b[idx] *= precond_[idx] * inv_n;

    SolveReport report;
    report.npe_count = 1;
    double rel = std::numeric_limits<double>::infinity();

    // Y <- M Y + b with M Y = V G(Q Y) - Q Y + Y  (note -i eps Q == V)
    for (int d = 0; d < config_.max_iters; ++d) {
        for (std::size_t idx = 0; idx < n; ++idx) t[idx] = precond_[idx] * y[idx];
        fft_->forward(t.data(), hat.data());
        for (std::size_t idx = 0; idx < n; ++idx) hat[idx] *= greens_mult_[idx];
        fft_->inverse(hat.data(), gbuf.data());
        ++report.npe_count;

        double diff_sq = 0.0;
        double norm_sq = 0.0;
        for (std::size_t idx = 0; idx < n; ++idx) {
            const std::complex<double> ynew =
                potential_[idx] * (gbuf[idx] * inv_n) - t[idx] + y[idx] + b[idx];
            diff_sq += std::norm(ynew - y[idx]);
            norm_sq += std::norm(ynew);
            y[idx] = ynew;
        }
        rel = norm_sq == 0.0 ? 0.0 : std::sqrt(diff_sq / norm_sq);
        report.iterations_used = d + 1;
        if (rel <= config_.tol) break;
    }
    report.final_rel_update = rel;
    report.converged = rel <= config_.tol;

    CbsSolution sol;
    sol.padded_field = ComplexField(g);
    sol.padded_field.values = std::move(y);
    sol.field = crop_field(sol.padded_field, medium_.pad);
    sol.report = report;

    for (const auto& v : sol.field.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("cbs: solver produced non-finite values");
    return sol;
}

CbsSolution CbsWorkspace::solve(const SourceTerm& source) const {
    const Grid2D interior{medium_.grid.nx - 2 * medium_.pad, medium_.grid.ny - 2 * medium_.pad,
                          medium_.grid.h, medium_.grid.ox + medium_.pad * medium_.grid.h,
                          medium_.grid.oy + medium_.pad * medium_.grid.h};
    if (!(source.field.grid == interior))
        throw ValidationError("cbs_solve: source grid does not match the speed grid");
    return solve_field(source.field);
}

CbsSolution cbs_solve(const SoundSpeedField& speed, const SourceTerm& source, double omega,
                      const CbsConfig& config) {
    CbsWorkspace ws(speed, omega, config);
    return ws.solve(source);
}

bool BcbsResult::all_converged() const {
    return std::all_of(solutions.begin(), solutions.end(),
                       [](const CbsSolution& s) { return s.report.converged; });
}

BcbsResult bcbs_solve(std::span<const SoundSpeedField> speeds, std::span<const SourceTerm> sources,
                      double omega, const CbsConfig& config, const BcbsOptions& options) {
    if (speeds.empty() || sources.empty())
        throw ValidationError("bcbs_solve: empty batch");
    for (const auto& s : speeds)
        if (!(s.grid == speeds.front().grid))
            throw ValidationError("bcbs_solve: all speeds must share one grid");
    for (const auto& src : sources)
        if (!(src.field.grid == speeds.front().grid))
            throw ValidationError("bcbs_solve: sources must live on the speed grid");

    const int n_speeds = static_cast<int>(speeds.size());
    const int n_sources = static_cast<int>(sources.size());

    // shared iteration operators: one workspace per speed
    std::vector<std::unique_ptr<CbsWorkspace>> workspaces;
    workspaces.reserve(n_speeds);
    for (const auto& s : speeds)
        workspaces.push_back(std::make_unique<CbsWorkspace>(s, omega, config));

    // shared source locations: one padded FFT per source
    std::vector<std::vector<std::complex<double>>> rho_hats;
    rho_hats.reserve(n_sources);
    for (const auto& src : sources)
        rho_hats.push_back(workspaces.front()->forward_fft_padded(src.field));

    BcbsResult result;
    result.n_speeds = n_speeds;
    result.n_sources = n_sources;
    result.solutions.resize(static_cast<std::size_t>(n_speeds) * n_sources);

    // Every pair iterates to its own stopping point (equivalently: converged
    // pairs freeze inside the shared loop), so each solution is bit-identical
    // to a standalone cbs_solve. Tiling and threading only bound scratch
    // memory and cannot change results.
    const std::size_t padded_n = workspaces.front()->padded_grid().size();
    const std::size_t per_pair_bytes = 6 * padded_n * sizeof(std::complex<double>);
    const std::size_t budget_bytes = options.memory_budget_mb * std::size_t(1 << 20);
    const int tile =
        std::max<int>(1, static_cast<int>(std::min<std::size_t>(
                             budget_bytes / std::max<std::size_t>(per_pair_bytes, 1),
                             static_cast<std::size_t>(n_speeds) * n_sources)));

    const int total = n_speeds * n_sources;
    const int threads = std::max(1, options.threads);
    for (int tile_start = 0; tile_start < total; tile_start += tile) {
        const int tile_end = std::min(total, tile_start + tile);
        auto run_range = [&](int begin, int end) {
            for (int p = begin; p < end; ++p) {
                const int i = p / n_sources;
                const int nsrc = p % n_sources;
                result.solutions[p] = workspaces[i]->solve_field(sources[nsrc].field,
                                                                 &rho_hats[nsrc]);
            }
        };
        if (threads == 1 || tile_end - tile_start == 1) {
            run_range(tile_start, tile_end);
        } else {
            std::vector<std::thread> pool;
            const int span = tile_end - tile_start;
            const int chunk = (span + threads - 1) / threads;
            for (int t = 0; t < threads && tile_start + t * chunk < tile_end; ++t)
                pool.emplace_back(run_range, tile_start + t * chunk,
                                  std::min(tile_end, tile_start + (t + 1) * chunk));
            for (auto& th : pool) th.join();
        }
    }
    return result;
}

double residual_check(const SoundSpeedField& speed, const ComplexField& wavefield,
                      const ComplexField& source, double omega, int interior_margin,
                      std::optional<std::pair<int, int>> exclude_node) {
    const Grid2D& g = wavefield.grid;
    if (!(speed.grid == g) || !(source.grid == g))
        throw ValidationError("residual_check: fields must share a grid");

    // spectral Laplacian of the wavefield
    FftPlan2D fft(g.nx, g.ny);
    std::vector<std::complex<double>> hat(g.size());
    fft.forward(wavefield.values.data(), hat.data());
    const auto px = angular_freqs(g.nx, g.h);
    const auto py = angular_freqs(g.ny, g.h);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            hat[static_cast<std::size_t>(j) * g.nx + i] *= -(px[i] * px[i] + py[j] * py[j]);
    std::vector<std::complex<double>> lap(g.size());
    fft.inverse(hat.data(), lap.data());
    const double inv_n = 1.0 / static_cast<double>(g.size());

    double num = 0.0, den = 0.0;
    for (int j = interior_margin; j < g.ny - interior_margin; ++j) {
        for (int i = interior_margin; i < g.nx - interior_margin; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * g.nx + i;
            den += std::norm(source.values[idx]);
            if (exclude_node && exclude_node->first == i && exclude_node->second == j) continue;
            const double k2 = (omega / speed.values[idx]) * (omega / speed.values[idx]);
            num += std::norm(lap[idx] * inv_n + k2 * wavefield.values[idx] + source.values[idx]);
        }
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

double solution_residual(const CbsSolution& sol, const SoundSpeedField& speed,
                         const SourceTerm& source, double omega, const CbsConfig& config,
                         bool exclude_source_node) {
    CbsConfig cfg = config;
    cfg.pad = (sol.padded_field.grid.nx - sol.field.grid.nx) / 2;
    const double fill = speed.values.front();
    const SoundSpeedField padded_speed = pad_field(speed, cfg.pad, fill);
    const ComplexField padded_source =
        pad_field(source.field, cfg.pad, std::complex<double>(0.0, 0.0));

    std::optional<std::pair<int, int>> exclude;
    if (exclude_source_node) {
        const BilinearStencil s =
            bilinear_stencil(speed.grid, source.nominal_x, source.nominal_y);
        // the splat's dominant corner
        int di = 0, dj = 0;
        double best = s.w00;
        if (s.w10 > best) { best = s.w10; di = 1; dj = 0; }
        if (s.w01 > best) { best = s.w01; di = 0; dj = 1; }
        if (s.w11 > best) { di = 1; dj = 1; }
        exclude = std::make_pair(s.i0 + di + cfg.pad, s.j0 + dj + cfg.pad);
    }
    return residual_check(padded_speed, sol.padded_field, padded_source, omega, cfg.pad, exclude);
}

SimulationResult forward_simulate(const SoundSpeedField& speed, const TransducerArray& array,
                                  double omega, const CbsConfig& config,
                                  const BcbsOptions& options) {
    std::vector<SourceTerm> sources;
    sources.reserve(array.count());
    for (int n = 0; n < array.count(); ++n) sources.push_back(make_source(array, n, speed.grid));

    const BcbsResult batch = bcbs_solve(std::span(&speed, 1), sources, omega, config, options);

    SimulationResult out;
    out.matrix.rows = array.count();
    out.matrix.cols = array.count();
    out.matrix.omega = omega;
    out.matrix.values.assign(static_cast<std::size_t>(array.count()) * array.count(), {0.0, 0.0});
    out.reports.reserve(array.count());
    for (int n = 0; n < array.count(); ++n) {
        const CbsSolution& sol = batch.at(0, n);
        const auto samples = sample_receivers(sol.field, array);
        for (int m = 0; m < array.count(); ++m) out.matrix.at(m, n) = samples[m];
        out.reports.push_back(sol.report);
    }
    return out;
}

}  // namespace usct
