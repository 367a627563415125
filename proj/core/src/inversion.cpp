#include "usct/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>

#include "usct/errors.hpp"

namespace usct {

namespace {

using Clock = std::chrono::steady_clock;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct Evaluation {
    double objective = 0.0;
    std::vector<double> grad;  // per-node derivative, h^2 * density
    bool all_converged = true;
};

class Problem {
public:
    Problem(const MeasurementMatrix& observed, const TransducerArray& array, const Grid2D& grid,
            const InversionConfig& inv, const CbsConfig& solver, const BcbsOptions& opts)
        : observed_(observed), array_(array), grid_(grid), inv_(inv), solver_(solver),
          opts_(opts) {}

    Evaluation eval(const std::vector<double>& x) {
        SoundSpeedField speed(grid_);
        speed.values = x;
        EvalOptions eo;
        eo.mask = inv_.mask;
        eo.solver = opts_;
        const EvalResult r = objective_and_gradient(speed, observed_, array_, solver_, eo);
        Evaluation out;
        out.objective = r.objective.value;
        out.all_converged = r.all_converged;
        const double h2 = grid_.h * grid_.h;
        out.grad.resize(r.gradient.values.size());
        for (std::size_t k = 0; k < out.grad.size(); ++k) out.grad[k] = h2 * r.gradient.values[k];
        ++npe_total;
        return out;
    }

    long npe_total = 0;

private:
    const MeasurementMatrix& observed_;
    const TransducerArray& array_;
    Grid2D grid_;
    const InversionConfig& inv_;
    CbsConfig solver_;
    BcbsOptions opts_;
};

std::vector<double> project(std::vector<double> x,
                            const std::optional<std::pair<double, double>>& bounds) {
    if (bounds)
        for (auto& v : x) v = std::clamp(v, bounds->first, bounds->second);
    return x;
}

}  // namespace

ReconstructionResult invert(const MeasurementMatrix& observed, const TransducerArray& array,
                            const Grid2D& grid, const InversionConfig& inv_config,
                            const CbsConfig& solver_config, const BcbsOptions& solver_options) {
    if (observed.rows != array.count() || observed.cols != array.count())
        throw ValidationError("invert: observed matrix does not match the array");
    if (inv_config.init && !(inv_config.init->grid == grid))
        throw ValidationError("invert: init field grid mismatch");

    double data_power = 0.0;
    for (const auto& v : observed.values) data_power += std::norm(v);

    Problem problem(observed, array, grid, inv_config, solver_config, solver_options);
    const auto t0 = Clock::now();
    auto wall_ms = [&t0] {
        return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };

    std::vector<double> x = inv_config.init
                                ? inv_config.init->values
                                : std::vector<double>(grid.size(), inv_config.background);
    x = project(std::move(x), inv_config.bounds);

    ReconstructionResult result;
    Evaluation cur = problem.eval(x);
    result.history.push_back(
        {0, cur.objective, norm2(cur.grad), problem.npe_total, wall_ms(), ""});

    // PDE-constrained descent; all solver work happens inside problem.eval
    std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)
    double gd_step = inv_config.gd.step;
    const StopRule& stop = inv_config.stop;

    auto best_x = x;
    double best_f = cur.objective;

    for (int outer = 1; outer <= stop.max_outer; ++outer) {
        std::string event;
        if (cur.objective <= stop.obj_rel_tol * data_power) {
            break;  // data fit reached
        }
        if (norm2(cur.grad) <= stop.grad_tol) break;

        if (inv_config.optimizer == Optimizer::GradientDescent) {
            int rejects = 0;
            Evaluation trial;
            std::vector<double> xt;
            while (true) {
                xt = x;
                for (std::size_t k = 0; k < xt.size(); ++k) xt[k] -= gd_step * cur.grad[k];
                xt = project(std::move(xt), inv_config.bounds);
                trial = problem.eval(xt);
                if (trial.objective <= cur.objective) break;
                gd_step /= 2.0;
                if (++rejects >= inv_config.gd.max_rejects) break;
            }
            if (rejects > 0) event = "gd_reject:" + std::to_string(rejects);
            if (trial.objective <= cur.objective) {
                x = std::move(xt);
                cur = std::move(trial);
            } else {
                event += "|step_stalled";
                result.history.push_back({outer, cur.objective, norm2(cur.grad),
                                          problem.npe_total, wall_ms(), event});
                break;
            }
        } else {
            // L-BFGS two-loop direction
            std::vector<double> d = cur.grad;
            std::vector<double> alpha_i(pairs.size());
            for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
                const auto& [s, yv] = pairs[i];
                const double rho = 1.0 / dot(yv, s);
                alpha_i[i] = rho * dot(s, d);
                for (std::size_t k = 0; k < d.size(); ++k) d[k] -= alpha_i[i] * yv[k];
            }
            if (!pairs.empty()) {
                const auto& [s, yv] = pairs.back();
                const double gamma = dot(s, yv) / dot(yv, yv);
                for (auto& v : d) v *= gamma;
            }
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const auto& [s, yv] = pairs[i];
                const double rho = 1.0 / dot(yv, s);
                const double beta = rho * dot(yv, d);
                for (std::size_t k = 0; k < d.size(); ++k) d[k] += (alpha_i[i] - beta) * s[k];
            }
            for (auto& v : d) v = -v;

            double dphi0 = dot(cur.grad, d);
            if (dphi0 >= 0.0) {  // not a descent direction; restart from steepest descent
                pairs.clear();
                d = cur.grad;
                for (auto& v : d) v = -v;
                dphi0 = dot(cur.grad, d);
            }

            // strong Wolfe line search on the projected arc
            const double c1 = inv_config.lbfgs.wolfe_c1;
            const double c2 = inv_config.lbfgs.wolfe_c2;
            const double phi0 = cur.objective;
            double alpha = 1.0;
            if (pairs.empty()) {
                double dinf = 0.0;
                for (double v : d) dinf = std::max(dinf, std::abs(v));
                alpha = dinf > 0.0 ? std::min(1.0, 10.0 / dinf) : 1.0;  // first step <= 10 m/s
            }

            auto phi_at = [&](double a, Evaluation& ev, std::vector<double>& xa) {
                xa = x;
                for (std::size_t k = 0; k < xa.size(); ++k) xa[k] += a * d[k];
                xa = project(std::move(xa), inv_config.bounds);
                ev = problem.eval(xa);
                return ev.objective;
            };

            bool accepted = false;
            std::vector<double> x_acc;
            Evaluation ev_acc;
            int evals = 0;

            double alpha_lo = 0.0, alpha_hi = 0.0;
            double phi_lo = phi0, phi_hi = 0.0;
            double dphi_lo = dphi0;
            bool bracketed = false;

            double alpha_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
            while (evals < inv_config.lbfgs.max_line_search) {
                Evaluation ev;
                std::vector<double> xa;
                const double phi = phi_at(alpha, ev, xa);
                ++evals;
                const double dphi = dot(ev.grad, d);
                if (phi > phi0 + c1 * alpha * dphi0 || (evals > 1 && phi >= phi_prev)) {
                    alpha_lo = alpha_prev; phi_lo = phi_prev; dphi_lo = dphi_prev;
                    alpha_hi = alpha; phi_hi = phi;
                    bracketed = true;
                    break;
                }
                if (std::abs(dphi) <= -c2 * dphi0) {
                    accepted = true; x_acc = std::move(xa); ev_acc = std::move(ev);
                    break;
                }
                if (dphi >= 0.0) {
                    alpha_lo = alpha; phi_lo = phi; dphi_lo = dphi;
                    alpha_hi = alpha_prev; phi_hi = phi_prev;
                    bracketed = true;
                    break;
                }
                alpha_prev = alpha; phi_prev = phi; dphi_prev = dphi;
                alpha *= 2.0;
            }

            if (bracketed && !accepted) {
                while (evals < inv_config.lbfgs.max_line_search) {
                    // quadratic interpolation with bisection fallback
                    double a = alpha_lo - 0.5 * dphi_lo * (alpha_hi - alpha_lo) * (alpha_hi - alpha_lo) /
                                              (phi_hi - phi_lo - dphi_lo * (alpha_hi - alpha_lo));
                    const double lo = std::min(alpha_lo, alpha_hi);
                    const double hi = std::max(alpha_lo, alpha_hi);
                    if (!std::isfinite(a) || a <= lo + 0.1 * (hi - lo) || a >= hi - 0.1 * (hi - lo))
                        a = 0.5 * (lo + hi);
                    Evaluation ev;
                    std::vector<double> xa;
                    const double phi = phi_at(a, ev, xa);
                    ++evals;
                    const double dphi = dot(ev.grad, d);
                    if (phi > phi0 + c1 * a * dphi0 || phi >= phi_lo) {
                        alpha_hi = a; phi_hi = phi;
                    } else {
                        if (std::abs(dphi) <= -c2 * dphi0) {
                            accepted = true; x_acc = std::move(xa); ev_acc = std::move(ev);
                            break;
                        }
                        if (dphi * (alpha_hi - alpha_lo) >= 0.0) {
                            alpha_hi = alpha_lo; phi_hi = phi_lo;
                        }
                        alpha_lo = a; phi_lo = phi; dphi_lo = dphi;
                    }
                    if (std::abs(alpha_hi - alpha_lo) < 1e-14) break;
                }
            }

            if (!accepted) {
                result.line_search_failed = true;
                result.history.push_back({outer, cur.objective, norm2(cur.grad),
                                          problem.npe_total, wall_ms(), "ls_fail"});
                break;
            }

            std::vector<double> s(x.size()), yv(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) {
                s[k] = x_acc[k] - x[k];
                yv[k] = ev_acc.grad[k] - cur.grad[k];
            }
            const double sy = dot(s, yv);
            if (sy > 1e-12 * norm2(s) * norm2(yv)) {
                pairs.emplace_back(std::move(s), std::move(yv));
                if (static_cast<int>(pairs.size()) > inv_config.lbfgs.memory) pairs.pop_front();
            }
            x = std::move(x_acc);
            cur = std::move(ev_acc);
        }

        if (cur.objective < best_f) {
            best_f = cur.objective;
            best_x = x;
        }
        result.history.push_back(
            {outer, cur.objective, norm2(cur.grad), problem.npe_total, wall_ms(), event});
    }

    result.final_speed = SoundSpeedField(grid);
    result.final_speed.values = cur.objective <= best_f ? x : best_x;
    return result;
}

double psnr(const RealField& reconstruction, const RealField& ground_truth, double data_range) {
    if (!(reconstruction.grid == ground_truth.grid))
        throw ValidationError("psnr: fields on different grids");
    if (!(data_range > 0.0)) throw ValidationError("psnr: data_range must be positive");
    double mse = 0.0;
    for (std::size_t k = 0; k < reconstruction.values.size(); ++k) {
        const double d = reconstruction.values[k] - ground_truth.values[k];
        mse += d * d;
    }
    mse /= static_cast<double>(reconstruction.values.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::vector<double> gaussian_window() {
    std::vector<double> w(kSsimWindow * kSsimWindow);
    const int c = kSsimWindow / 2;
    double sum = 0.0;
    for (int j = 0; j < kSsimWindow; ++j)
        for (int i = 0; i < kSsimWindow; ++i) {
            const double r2 = (i - c) * (i - c) + (j - c) * (j - c);
            w[j * kSsimWindow + i] = std::exp(-r2 / (2.0 * kSsimSigma * kSsimSigma));
            sum += w[j * kSsimWindow + i];
        }
    for (auto& v : w) v /= sum;
    return w;
}

}  // namespace

double ssim(const RealField& a, const RealField& b, double data_range) {
    if (!(a.grid == b.grid)) throw ValidationError("ssim: fields on different grids");
    if (a.grid.nx < kSsimWindow || a.grid.ny < kSsimWindow)
        throw ValidationError("ssim: grid smaller than the 11x11 window");
    if (!(data_range > 0.0)) throw ValidationError("ssim: data_range must be positive");

    static const std::vector<double> w = gaussian_window();
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);

    double total = 0.0;
    long count = 0;
    for (int j0 = 0; j0 + kSsimWindow <= a.grid.ny; ++j0) {
        for (int i0 = 0; i0 + kSsimWindow <= a.grid.nx; ++i0) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int j = 0; j < kSsimWindow; ++j)
                for (int i = 0; i < kSsimWindow; ++i) {
                    const double wk = w[j * kSsimWindow + i];
                    mu_a += wk * a.at(i0 + i, j0 + j);
                    mu_b += wk * b.at(i0 + i, j0 + j);
                }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int j = 0; j < kSsimWindow; ++j)
                for (int i = 0; i < kSsimWindow; ++i) {
                    const double wk = w[j * kSsimWindow + i];
                    const double da = a.at(i0 + i, j0 + j) - mu_a;
                    const double db = b.at(i0 + i, j0 + j) - mu_b;
                    va += wk * da * da;
                    vb += wk * db * db;
                    cov += wk * da * db;
                }
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("history: cannot open for writing: " + path);
    out << "outer_iter,objective,grad_norm,npe_total,wall_ms\n";
    char line[256];
    for (const auto& e : history) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%ld,%.3f\n", e.outer_iter, e.objective,
                      e.grad_norm, e.npe_total, e.wall_ms);
        out << line;
    }
    if (!out) throw IoError("history: write failed: " + path);
}

}  // namespace usct
