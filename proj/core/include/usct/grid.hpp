#pragma once

#include <cstddef>

namespace usct {

// Uniform 2D grid. Values attached to it are stored row-major with
// index = j*nx + i, node (i,j) at physical (ox + i*h, oy + j*h).
// Every module in this library shares that convention.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double h = 0.0;   // spacing [m], same along both axes
    double ox = 0.0;  // physical x of node (0,0)
    double oy = 0.0;  // physical y of node (0,0)

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double extent_x() const { return (nx - 1) * h; }
    double extent_y() const { return (ny - 1) * h; }
    double x(int i) const { return ox + i * h; }
    double y(int j) const { return oy + j * h; }
    double center_x() const { return ox + extent_x() / 2.0; }
    double center_y() const { return oy + extent_y() / 2.0; }

    bool operator==(const Grid2D&) const = default;
};

// Validates nx,ny >= 4 and h > 0; throws ValidationError otherwise.
Grid2D make_grid(int nx, int ny, double h, double ox, double oy);

// Grid whose physical center is the origin.
Grid2D make_centered_grid(int nx, int ny, double h);

}  // namespace usct
