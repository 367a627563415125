#pragma once

#include <complex>
#include <fftw3.h>

namespace usct {

// RAII pair of 2D c2c plans for one grid size. Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they execute on any buffer and their
// output is reproducible across runs and threads (no wisdom, no timing
// search). Plan creation is serialized internally (FFTW requirement);
// execution on distinct buffers is thread-safe.
class FftPlan2D {
public:
    FftPlan2D(int nx, int ny);
    ~FftPlan2D();
    FftPlan2D(const FftPlan2D&) = delete;
    FftPlan2D& operator=(const FftPlan2D&) = delete;

    // out = DFT(in); inverse is unnormalized (caller divides by nx*ny)
    void forward(const std::complex<double>* in, std::complex<double>* out) const;
    void inverse(const std::complex<double>* in, std::complex<double>* out) const;

    int nx() const { return nx_; }
    int ny() const { return ny_; }

private:
    int nx_;
    int ny_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

}  // namespace usct
