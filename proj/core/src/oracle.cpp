#include "usct/oracle.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <string>

#include "usct/errors.hpp"

namespace usct::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// power-series / asymptotic switchover for J0, Y0
constexpr double kBesselSwitch = 12.0;

std::vector<double> dft_angular_freqs(int n, double h) {
    std::vector<double> p(n);
    const double base = 2.0 * kPi / (n * h);
    for (int k = 0; k < n; ++k) p[k] = base * (k < (n + 1) / 2 ? k : k - n);
    return p;
}

void series_j0_y0(double x, double& j0, double& y0) {
    // long double accumulation keeps the alternating-series cancellation
    // below 1e-15 absolute up to the switchover
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, jsum = 1.0L, ysum = 0.0L, harmonic = 0.0L;
    for (int k = 1; k <= 60; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        harmonic += 1.0L / k;
        jsum += term;
        ysum += -term * harmonic;  // sum (-1)^{k+1} H_k q^k / (k!)^2
        if (std::abs(static_cast<double>(term)) < 1e-22 * (1.0 + std::abs(static_cast<double>(jsum))))
            break;
    }
    j0 = static_cast<double>(jsum);
    y0 = static_cast<double>((2.0L / kPi) *
                             ((std::log(static_cast<long double>(x) / 2.0L) + kEulerGamma) * jsum +
                              ysum));
}

// H0^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - pi/4)} sum_k i^k a_k / x^k,
// a_k = -a_{k-1} (2k-1)^2 / (8k); truncated at the smallest term
std::complex<double> asymptotic_h0(double x) {
    std::complex<double> sum(0.0, 0.0);
    double a = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    std::complex<double> ik(1.0, 0.0);
    double xk = 1.0;
    for (int k = 0; k <= 40; ++k) {
        const double mag = std::abs(a) / xk;
        if (mag > prev_mag) break;  // asymptotic tail starts to grow
        sum += ik * (a / xk);
        prev_mag = mag;
        ik *= std::complex<double>(0.0, 1.0);
        a *= -(2.0 * k + 1.0) * (2.0 * k + 1.0) / (8.0 * (k + 1.0));
        xk *= x;
    }
    const std::complex<double> phase(std::cos(x - kPi / 4.0), std::sin(x - kPi / 4.0));
    return std::sqrt(2.0 / (kPi * x)) * phase * sum;
}

}  // namespace

double bessel_j0(double x) {
    x = std::abs(x);
    if (x < kBesselSwitch) {
        double j0, y0;
        series_j0_y0(std::max(x, 1e-300), j0, y0);
        return j0;
    }
    return asymptotic_h0(x).real();
}

double bessel_y0(double x) {
    if (!(x > 0.0)) throw ValidationError("bessel_y0: argument must be positive");
    if (x < kBesselSwitch) {
        double j0, y0;
        series_j0_y0(x, j0, y0);
        return y0;
    }
    return asymptotic_h0(x).imag();
}

std::complex<double> hankel1_0(double x) {
    if (!(x > 0.0)) throw ValidationError("hankel1_0: argument must be positive");
    if (x < kBesselSwitch) {
        double j0, y0;
        series_j0_y0(x, j0, y0);
        return {j0, y0};
    }
    return asymptotic_h0(x);
}

std::vector<std::complex<double>> analytic_green2d(
    double k0, double src_x, double src_y,
    std::span<const std::pair<double, double>> eval_points) {
    if (!(k0 > 0.0)) throw ValidationError("analytic_green2d: k0 must be positive");
    std::vector<std::complex<double>> out;
    out.reserve(eval_points.size());
    for (const auto& [x, y] : eval_points) {
        const double d = std::hypot(x - src_x, y - src_y);
        if (d == 0.0)
            throw ValidationError("analytic_green2d: evaluation point coincides with the source");
        out.push_back(std::complex<double>(0.0, 0.25) * hankel1_0(k0 * d));
    }
    return out;
}

namespace {

constexpr std::size_t kDenseMaxUnknowns = 2200;

std::vector<std::complex<double>> laplacian_kernel(const Grid2D& g) {
    // circulant row of -lap_spectral via explicit DFT sums; O(N^2) but only
    // run on oracle-sized grids
    const auto px = dft_angular_freqs(g.nx, g.h);
    const auto py = dft_angular_freqs(g.ny, g.h);
    const std::size_t n = g.size();
    std::vector<std::complex<double>> ker(n, {0.0, 0.0});
    for (int dj = 0; dj < g.ny; ++dj) {
        for (int di = 0; di < g.nx; ++di) {
            long double re = 0.0L;
            for (int kj = 0; kj < g.ny; ++kj)
                for (int ki = 0; ki < g.nx; ++ki) {
                    const double p2 = px[ki] * px[ki] + py[kj] * py[kj];
                    const double ang =
                        2.0 * kPi * (static_cast<double>(ki) * di / g.nx +
                                     static_cast<double>(kj) * dj / g.ny);
                    re += static_cast<long double>(p2) * std::cos(ang);
                }
            ker[static_cast<std::size_t>(dj) * g.nx + di] =
                std::complex<double>(static_cast<double>(re / static_cast<long double>(n)), 0.0);
        }
    }
    return ker;
}

}  // namespace

DenseOperator build_dense_operator(const SoundSpeedField& speed, double omega,
                                   const CbsConfig& config) {
    if (speed.grid.nx > 32 || speed.grid.ny > 32)
        throw ValidationError("dense operator: interior grid capped at 32x32");
    const PaddedMedium medium = make_padded_medium(speed, omega, config);
    const std::size_t n = medium.grid.size();
    if (n > kDenseMaxUnknowns)
        throw ValidationError("dense operator: padded system too large (" + std::to_string(n) +
                              " unknowns)");

    DenseOperator op;
    op.grid = medium.grid;
    op.pad = medium.pad;
    op.matrix.assign(n * n, {0.0, 0.0});
    const auto ker = laplacian_kernel(medium.grid);
    const int nx = medium.grid.nx;
    const int ny = medium.grid.ny;
    for (std::size_t a = 0; a < n; ++a) {
        const int ia = static_cast<int>(a) % nx;
        const int ja = static_cast<int>(a) / nx;
        for (std::size_t b = 0; b < n; ++b) {
            const int ib = static_cast<int>(b) % nx;
            const int jb = static_cast<int>(b) / nx;
            const int di = ((ia - ib) % nx + nx) % nx;
            const int dj = ((ja - jb) % ny + ny) % ny;
            op.matrix[a * n + b] = ker[static_cast<std::size_t>(dj) * nx + di];
        }
        op.matrix[a * n + a] -= medium.k2[a];
    }
    return op;
}

std::vector<std::complex<double>> DenseOperator::apply(
    std::span<const std::complex<double>> v) const {
    const std::size_t n = dim();
    if (v.size() != n) throw ValidationError("dense apply: size mismatch");
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    for (std::size_t a = 0; a < n; ++a) {
        std::complex<double> s(0.0, 0.0);
        const std::complex<double>* row = matrix.data() + a * n;
        for (std::size_t b = 0; b < n; ++b) s += row[b] * v[b];
        out[a] = s;
    }
    return out;
}

ComplexField dense_solve(const SoundSpeedField& speed, const SourceTerm& source, double omega,
                         const CbsConfig& config) {
    if (!(source.field.grid == speed.grid))
        throw ValidationError("dense_solve: source grid mismatch");
    const DenseOperator op = build_dense_operator(speed, omega, config);
    const std::size_t n = op.dim();

    const ComplexField rho =
        pad_field(source.field, op.pad, std::complex<double>(0.0, 0.0));

    using Mat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const Mat> a_map(op.matrix.data(), static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(n));
    Eigen::Map<const Eigen::VectorXcd> rhs(rho.values.data(), static_cast<Eigen::Index>(n));
    if (rhs.norm() == 0.0) return ComplexField(speed.grid);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a_map);
    const Eigen::VectorXcd sol = lu.solve(rhs);
    const double rel_residual = (a_map * sol - rhs).norm() / rhs.norm();
    if (!(rel_residual < 1e-6))
        throw NumericalError("dense_solve: system close to singular, residual " +
                             std::to_string(rel_residual));

    ComplexField padded(op.grid);
    for (std::size_t k = 0; k < n; ++k) padded.values[k] = sol(static_cast<Eigen::Index>(k));
    return crop_field(padded, op.pad);
}

ComplexField greens_apply_dft(const ComplexField& f, double h, double k0_sq, double epsilon) {
    const Grid2D& g = f.grid;
    if (g.size() > 512) throw ValidationError("greens_apply_dft: capped at 512 nodes");
    const auto px = dft_angular_freqs(g.nx, h);
    const auto py = dft_angular_freqs(g.ny, h);

    // forward DFT
    std::vector<std::complex<double>> hat(g.size(), {0.0, 0.0});
    for (int kj = 0; kj < g.ny; ++kj)
        for (int ki = 0; ki < g.nx; ++ki) {
            std::complex<double> s(0.0, 0.0);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double ang = -2.0 * kPi * (static_cast<double>(ki) * i / g.nx +
                                                     static_cast<double>(kj) * j / g.ny);
                    s += f.at(i, j) * std::complex<double>(std::cos(ang), std::sin(ang));
                }
            hat[static_cast<std::size_t>(kj) * g.nx + ki] =
                s / (px[ki] * px[ki] + py[kj] * py[kj] -
                     std::complex<double>(k0_sq, epsilon));
        }

    // inverse DFT
    ComplexField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::complex<double> s(0.0, 0.0);
            for (int kj = 0; kj < g.ny; ++kj)
                for (int ki = 0; ki < g.nx; ++ki) {
                    const double ang = 2.0 * kPi * (static_cast<double>(ki) * i / g.nx +
                                                    static_cast<double>(kj) * j / g.ny);
                    s += hat[static_cast<std::size_t>(kj) * g.nx + ki] *
                         std::complex<double>(std::cos(ang), std::sin(ang));
                }
            out.at(i, j) = s / static_cast<double>(g.size());
        }
    return out;
}

std::vector<double> fd_gradient(const SoundSpeedField& speed, const MeasurementMatrix& observed,
                                const TransducerArray& array,
                                std::span<const std::pair<int, int>> nodes, double fd_step,
                                double omega, const CbsConfig& config) {
    if (!(fd_step > 0.0)) throw ValidationError("fd_gradient: fd_step must be positive");
    if (speed.grid.nx > 128 || speed.grid.ny > 128)
        throw ValidationError("fd_gradient: desk-scale grids only (<= 128 per side)");

    auto misfit = [&](const SoundSpeedField& s) {
        const SimulationResult sim = forward_simulate(s, array, omega, config);
        double t = 0.0;
        for (std::size_t k = 0; k < sim.matrix.values.size(); ++k)
            t += std::norm(sim.matrix.values[k] - observed.values[k]);
        return t;
    };

    // (T(x + e) - T(x - e)) / (2 fd h^2): comparable to the gradient density
    const double h2 = speed.grid.h * speed.grid.h;
    std::vector<double> out;
    out.reserve(nodes.size());
    for (const auto& [i, j] : nodes) {
        SoundSpeedField plus = speed;
        plus.at(i, j) += fd_step;
        SoundSpeedField minus = speed;
        minus.at(i, j) -= fd_step;
        out.push_back((misfit(plus) - misfit(minus)) / (2.0 * fd_step * h2));
    }
    return out;
}

double ssim_reference(const RealField& a, const RealField& b, double data_range) {
    if (!(a.grid == b.grid)) throw ValidationError("ssim_reference: grids differ");
    const int win = 11;
    const double sigma = 1.5;
    if (a.grid.nx < win || a.grid.ny < win)
        throw ValidationError("ssim_reference: grid smaller than window");
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);

    double total = 0.0;
    long count = 0;
    for (int j0 = 0; j0 + win <= a.grid.ny; ++j0) {
        for (int i0 = 0; i0 + win <= a.grid.nx; ++i0) {
            double wsum = 0.0, mu_a = 0.0, mu_b = 0.0;
            for (int j = 0; j < win; ++j)
                for (int i = 0; i < win; ++i) {
                    const double r2 = (i - win / 2) * (i - win / 2) + (j - win / 2) * (j - win / 2);
                    const double wk = std::exp(-r2 / (2.0 * sigma * sigma));
                    wsum += wk;
                    mu_a += wk * a.at(i0 + i, j0 + j);
                    mu_b += wk * b.at(i0 + i, j0 + j);
                }
            mu_a /= wsum;
            mu_b /= wsum;
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int j = 0; j < win; ++j)
                for (int i = 0; i < win; ++i) {
                    const double r2 = (i - win / 2) * (i - win / 2) + (j - win / 2) * (j - win / 2);
                    const double wk = std::exp(-r2 / (2.0 * sigma * sigma)) / wsum;
                    va += wk * (a.at(i0 + i, j0 + j) - mu_a) * (a.at(i0 + i, j0 + j) - mu_a);
                    vb += wk * (b.at(i0 + i, j0 + j) - mu_b) * (b.at(i0 + i, j0 + j) - mu_b);
                    cov += wk * (a.at(i0 + i, j0 + j) - mu_a) * (b.at(i0 + i, j0 + j) - mu_b);
                }
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace usct::oracle
