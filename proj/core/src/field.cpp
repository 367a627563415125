#include "usct/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace usct {

BilinearStencil bilinear_stencil(const Grid2D& grid, double x, double y) {
    const double fx = (x - grid.ox) / grid.h;
    const double fy = (y - grid.oy) / grid.h;
    // tolerate float fuzz of a few ulps at the physical boundary
    const double slack = 1e-9;
    if (fx < -slack || fx > grid.nx - 1 + slack || fy < -slack || fy > grid.ny - 1 + slack)
        throw ValidationError("bilinear_stencil: point (" + std::to_string(x) + ", " +
                              std::to_string(y) + ") outside grid extent");
    int i = static_cast<int>(std::floor(fx));
    int j = static_cast<int>(std::floor(fy));
    i = std::clamp(i, 0, grid.nx - 2);
    j = std::clamp(j, 0, grid.ny - 2);
    const double tx = std::clamp(fx - i, 0.0, 1.0);
    const double ty = std::clamp(fy - j, 0.0, 1.0);
    return BilinearStencil{i, j, (1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
}

template <typename T>
Field2D<T> resample(const Field2D<T>& src, const Grid2D& dst_grid) {
    if (src.grid == dst_grid) return src;
    const double slack = 1e-9 * src.grid.h;
    if (dst_grid.ox < src.grid.ox - slack || dst_grid.oy < src.grid.oy - slack ||
        dst_grid.ox + dst_grid.extent_x() > src.grid.ox + src.grid.extent_x() + slack ||
        dst_grid.oy + dst_grid.extent_y() > src.grid.oy + src.grid.extent_y() + slack)
        throw ValidationError("resample: destination extent exceeds source extent");
    Field2D<T> out(dst_grid);
    for (int j = 0; j < dst_grid.ny; ++j)
        for (int i = 0; i < dst_grid.nx; ++i)
            out.at(i, j) = bilinear_sample(src, dst_grid.x(i), dst_grid.y(j));
    return out;
}

template <typename T>
Field2D<T> pad_field(const Field2D<T>& f, int pad, T fill) {
    if (pad < 0) throw ValidationError("pad_field: pad must be >= 0");
    if (pad == 0) return f;
    const Grid2D& g = f.grid;
    Grid2D pg{g.nx + 2 * pad, g.ny + 2 * pad, g.h, g.ox - pad * g.h, g.oy - pad * g.h};
    Field2D<T> out(pg, fill);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.at(i + pad, j + pad) = f.at(i, j);
    return out;
}

template <typename T>
Field2D<T> crop_field(const Field2D<T>& f, int pad) {
    if (pad < 0) throw ValidationError("crop_field: pad must be >= 0");
    if (pad == 0) return f;
    const Grid2D& g = f.grid;
    if (g.nx <= 2 * pad || g.ny <= 2 * pad)
        throw ValidationError("crop_field: pad too large for grid");
    Grid2D cg{g.nx - 2 * pad, g.ny - 2 * pad, g.h, g.ox + pad * g.h, g.oy + pad * g.h};
    Field2D<T> out(cg);
    for (int j = 0; j < cg.ny; ++j)
        for (int i = 0; i < cg.nx; ++i)
            out.at(i, j) = f.at(i + pad, j + pad);
    return out;
}

template Field2D<double> resample(const Field2D<double>&, const Grid2D&);
template Field2D<std::complex<double>> resample(const Field2D<std::complex<double>>&, const Grid2D&);
template Field2D<double> pad_field(const Field2D<double>&, int, double);
template Field2D<std::complex<double>> pad_field(const Field2D<std::complex<double>>&, int, std::complex<double>);
template Field2D<double> crop_field(const Field2D<double>&, int);
template Field2D<std::complex<double>> crop_field(const Field2D<std::complex<double>>&, int);

}  // namespace usct
