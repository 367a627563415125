#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usct/adjoint.hpp"

namespace usct {

struct GradientDescentConfig {
    double step = 0.1;        // eta; halved whenever a trial increases the objective
    int max_rejects = 20;     // per outer iteration
};

struct LbfgsConfig {
    int memory = 10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search = 20;
};

enum class Optimizer { GradientDescent, Lbfgs };

struct StopRule {
    int max_outer = 30;
    double grad_tol = 0.0;         // stop when ||g||_2 <= grad_tol
    double obj_rel_tol = 1e-10;    // stop when T <= obj_rel_tol * ||y||^2
};

struct InversionConfig {
    Optimizer optimizer = Optimizer::Lbfgs;
    GradientDescentConfig gd;
    LbfgsConfig lbfgs;
    std::optional<SoundSpeedField> init;              // empty = constant background
    double background = 1500.0;
    std::optional<std::pair<double, double>> bounds = std::make_pair(1408.0, 1595.0);
    StopRule stop;
    std::optional<RoiMask> mask;                      // gradient support restriction
};

struct HistoryEntry {
    int outer_iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;  // l2 over per-node derivatives
    long npe_total = 0;      // batched forward solves so far
    double wall_ms = 0.0;
    std::string event;       // "", "gd_reject", "ls_fail", "stopped"
};

struct Metrics {
    double psnr_db = 0.0;  // +inf encoded as std::numeric_limits::infinity
    double ssim = 0.0;
};

struct ReconstructionResult {
    SoundSpeedField final_speed;
    std::vector<HistoryEntry> history;
    std::optional<Metrics> metrics;
    bool line_search_failed = false;
};

ReconstructionResult invert(const MeasurementMatrix& observed, const TransducerArray& array,
                            const Grid2D& grid, const InversionConfig& inv_config,
                            const CbsConfig& solver_config, const BcbsOptions& solver_options = {});

// 10*log10(data_range^2 / MSE); +infinity when the fields are identical.
// data_range defaults to the phantom speed range 1595 - 1408.
double psnr(const RealField& reconstruction, const RealField& ground_truth,
            double data_range = 187.0);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), C1=(0.01 R)^2,
// C2=(0.03 R)^2, averaged over window-sized valid positions.
double ssim(const RealField& reconstruction, const RealField& ground_truth,
            double data_range = 187.0);

void write_history_csv(const std::string& path, const std::vector<HistoryEntry>& history);

}  // namespace usct
