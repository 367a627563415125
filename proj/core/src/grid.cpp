#include "usct/grid.hpp"

#include <string>

#include "usct/errors.hpp"

namespace usct {

Grid2D make_grid(int nx, int ny, double h, double ox, double oy) {
    if (nx < 4 || ny < 4)
        throw ValidationError("make_grid: nx and ny must be >= 4, got " + std::to_string(nx) +
                              "x" + std::to_string(ny));
    if (!(h > 0.0))
        throw ValidationError("make_grid: spacing must be positive");
    return Grid2D{nx, ny, h, ox, oy};
}

Grid2D make_centered_grid(int nx, int ny, double h) {
    return make_grid(nx, ny, h, -(nx - 1) * h / 2.0, -(ny - 1) * h / 2.0);
}

}  // namespace usct
