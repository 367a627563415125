#pragma once

#include <complex>
#include <vector>

#include "usct/errors.hpp"
#include "usct/grid.hpp"

namespace usct {

template <typename T>
struct Field2D {
    Grid2D grid;
    std::vector<T> values;  // row-major, index = j*nx + i

    Field2D() = default;
    explicit Field2D(const Grid2D& g, T fill = T{})
        : grid(g), values(g.size(), fill) {}

    T& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    const T& at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
};

using RealField = Field2D<double>;
using ComplexField = Field2D<std::complex<double>>;

// Sound speed in m/s; values must be strictly positive wherever a solver
// consumes the field.
using SoundSpeedField = RealField;

// Weights of the four nodes surrounding a physical point, used both for
// point evaluation (receivers) and for placing discrete impulses (sources).
// The two roles share one stencil on purpose: it makes the discrete forward
// map symmetric in (source, receiver), which reciprocity and the adjoint
// gradient tests rely on.
struct BilinearStencil {
    int i0, j0;        // lower-left node
    double w00, w10, w01, w11;
};

// Throws ValidationError if (x,y) lies outside the grid extent (a point
// exactly on the boundary is inside).
BilinearStencil bilinear_stencil(const Grid2D& grid, double x, double y);

template <typename T>
T bilinear_sample(const Field2D<T>& f, double x, double y) {
    const BilinearStencil s = bilinear_stencil(f.grid, x, y);
    return static_cast<T>(f.at(s.i0, s.j0) * s.w00 + f.at(s.i0 + 1, s.j0) * s.w10 +
                          f.at(s.i0, s.j0 + 1) * s.w01 + f.at(s.i0 + 1, s.j0 + 1) * s.w11);
}

// Fills every node of dst_grid by bilinear sampling of src. The destination
// extent must be contained in the source extent.
template <typename T>
Field2D<T> resample(const Field2D<T>& src, const Grid2D& dst_grid);

// New field with `pad` extra nodes on each side set to `fill`; the origin
// shifts by -pad*h per axis so interior nodes keep their physical positions.
template <typename T>
Field2D<T> pad_field(const Field2D<T>& f, int pad, T fill);

// Inverse of pad_field with the same width.
template <typename T>
Field2D<T> crop_field(const Field2D<T>& f, int pad);

extern template Field2D<double> resample(const Field2D<double>&, const Grid2D&);
extern template Field2D<std::complex<double>> resample(const Field2D<std::complex<double>>&, const Grid2D&);
extern template Field2D<double> pad_field(const Field2D<double>&, int, double);
extern template Field2D<std::complex<double>> pad_field(const Field2D<std::complex<double>>&, int, std::complex<double>);
extern template Field2D<double> crop_field(const Field2D<double>&, int);
extern template Field2D<std::complex<double>> crop_field(const Field2D<std::complex<double>>&, int);

}  // namespace usct
