#include "fft_plan.hpp"

#include <mutex>
#include <vector>

namespace usct {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan2D::FftPlan2D(int nx, int ny) : nx_(nx), ny_(ny) {
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(nx) * ny);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    // n0 = ny (slow, row index j), n1 = nx: matches j*nx + i layout
    fwd_ = fftw_plan_dft_2d(ny, nx, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft_2d(ny, nx, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

FftPlan2D::~FftPlan2D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
}

void FftPlan2D::forward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void FftPlan2D::inverse(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(inv_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace usct
