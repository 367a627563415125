#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "usct/container.hpp"
#include "usct/field.hpp"
#include "usct/grid.hpp"
#include "usct/rng.hpp"

using namespace usct;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("usct_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("make_grid computes extents") {
    const Grid2D g = make_centered_grid(480, 480, 5.0e-4);
    CHECK(g.extent_x() == doctest::Approx(0.2395).epsilon(1e-12));
    CHECK(g.extent_y() == doctest::Approx(0.2395).epsilon(1e-12));

    const Grid2D small = make_grid(4, 4, 1.0, 0.0, 0.0);
    CHECK(small.extent_x() == 3.0);
    CHECK(small.extent_y() == 3.0);

    const Grid2D desk = make_centered_grid(96, 96, 5.0e-4);
    CHECK(desk.extent_x() == doctest::Approx(0.0475).epsilon(1e-12));
}

TEST_CASE("make_grid rejects bad dimensions") {
    CHECK_THROWS_AS(make_grid(3, 8, 1.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(make_grid(8, 2, 1.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(make_grid(8, 8, 0.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(make_grid(8, 8, -1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("bilinear sampling is exact at nodes and cell centers") {
    const Grid2D g = make_grid(4, 4, 1.0, 0.0, 0.0);
    RealField f(g);
    f.at(1, 2) = 7.5;
    CHECK(bilinear_sample(f, g.x(1), g.y(2)) == 7.5);

    RealField corners(g);
    corners.at(0, 0) = 1.0;
    corners.at(1, 0) = 2.0;
    corners.at(0, 1) = 3.0;
    corners.at(1, 1) = 4.0;
    CHECK(bilinear_sample(corners, 0.5, 0.5) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("bilinear sampling reproduces affine fields") {
    const Grid2D g = make_centered_grid(16, 12, 0.25);
    RealField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = g.x(i) + 2.0 * g.y(j);

    Rng rng(123);
    for (int t = 0; t < 200; ++t) {
        const double x = rng.uniform(g.ox, g.ox + g.extent_x());
        const double y = rng.uniform(g.oy, g.oy + g.extent_y());
        const double want = x + 2.0 * y;
        CHECK(bilinear_sample(f, x, y) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("bilinear sampling rejects out-of-extent points") {
    const Grid2D g = make_grid(4, 4, 1.0, 0.0, 0.0);
    RealField f(g);
    CHECK_THROWS_AS(bilinear_sample(f, -0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(bilinear_sample(f, 1.0, 3.5), ValidationError);
    CHECK_NOTHROW(bilinear_sample(f, 3.0, 3.0));  // boundary is inside
}

TEST_CASE("resample identity and constants") {
    const Grid2D g = make_centered_grid(8, 8, 0.5);
    RealField f(g);
    Rng rng(7);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);

    const RealField same = resample(f, g);
    CHECK(same.values == f.values);  // bitwise

    RealField c(g, 3.25);
    const Grid2D dst = make_grid(5, 6, 0.4, -1.0, -1.0);
    const RealField cr = resample(c, dst);
    for (double v : cr.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("resample round-trips a linear ramp") {
    const Grid2D g32 = make_centered_grid(32, 32, 1.0 / 31.0);
    RealField ramp(g32);
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i) ramp.at(i, j) = 3.0 * g32.x(i) - 1.5 * g32.y(j) + 0.25;

    const Grid2D g64 = make_centered_grid(64, 64, g32.extent_x() / 63.0);
    const RealField up = resample(ramp, g64);
    const RealField back = resample(up, g32);
    for (std::size_t k = 0; k < ramp.values.size(); ++k)
        CHECK(std::abs(back.values[k] - ramp.values[k]) < 1e-12);
}

TEST_CASE("resample rejects larger destination extents") {
    const Grid2D g = make_centered_grid(8, 8, 0.5);
    RealField f(g);
    const Grid2D bigger = make_centered_grid(8, 8, 0.6);
    CHECK_THROWS_AS(resample(f, bigger), ValidationError);
}

TEST_CASE("pad and crop round-trip bitwise") {
    const Grid2D g = make_grid(4, 4, 1.0, 0.0, 0.0);
    RealField f(g);
    Rng rng(99);
    for (auto& v : f.values) v = rng.uniform(0.0, 10.0);

    const RealField same = pad_field(f, 0, 0.0);
    CHECK(same.values == f.values);

    const RealField padded = pad_field(f, 2, -1.0);
    CHECK(padded.grid.nx == 8);
    CHECK(padded.grid.ny == 8);
    CHECK(padded.grid.ox == doctest::Approx(g.ox - 2.0));
    CHECK(padded.at(0, 0) == -1.0);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) CHECK(padded.at(i + 2, j + 2) == f.at(i, j));

    const RealField cropped = crop_field(padded, 2);
    CHECK(cropped.grid == f.grid);
    CHECK(cropped.values == f.values);
}

TEST_CASE("container round-trips real and complex payloads up to rank 4") {
    TempDir tmp;
    Rng rng(2024);
    for (int rank = 1; rank <= 4; ++rank) {
        ArrayContainer a;
        a.dims.clear();
        std::uint64_t n = 1;
        for (int d = 0; d < rank; ++d) {
            a.dims.push_back(2 + static_cast<std::uint64_t>(rng.uniform_int(0, 2)));
            n *= a.dims.back();
        }
        SUBCASE((std::string("rank ") + std::to_string(rank)).c_str()) {}
        a.dtype = Dtype::Real64;
        a.reals.resize(n);
        for (auto& v : a.reals) v = rng.uniform(-5.0, 5.0);
        const std::string path = tmp.file("real_" + std::to_string(rank) + ".usct");
        write_container(path, a);
        const ArrayContainer back = read_container(path);
        CHECK(back.dims == a.dims);
        CHECK(back.reals == a.reals);

        ArrayContainer c;
        c.dtype = Dtype::Complex128;
        c.dims = a.dims;
        c.cplx.resize(n);
        for (auto& v : c.cplx) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const std::string cpath = tmp.file("cplx_" + std::to_string(rank) + ".usct");
        write_container(cpath, c);
        const ArrayContainer cback = read_container(cpath);
        CHECK(cback.cplx == c.cplx);
    }
}

TEST_CASE("container header size arithmetic") {
    TempDir tmp;
    const Grid2D g = make_centered_grid(480, 480, 5.0e-4);
    RealField f(g, 1500.0);
    const std::string path = tmp.file("big.usct");
    write_container(path, to_container(f));
    // 4 magic + 2 version + 1 dtype + 1 rank + 2*8 dims = 24 header bytes
    CHECK(fs::file_size(path) == 24 + 480ull * 480ull * 8ull);
}

TEST_CASE("container rejects bad magic, version and truncation") {
    TempDir tmp;
    const Grid2D g = make_grid(4, 4, 1.0, 0.0, 0.0);
    RealField f(g, 1.0);
    const std::string path = tmp.file("field.usct");
    write_container(path, to_container(f));

    auto corrupt = [&](std::size_t offset, char byte) {
        const std::string out = tmp.file("corrupt.usct");
        fs::copy_file(path, out, fs::copy_options::overwrite_existing);
        std::fstream s(out, std::ios::in | std::ios::out | std::ios::binary);
        s.seekp(static_cast<std::streamoff>(offset));
        s.write(&byte, 1);
        return out;
    };

    CHECK_THROWS_AS(read_container(corrupt(0, 'X')), IoError);   // magic
    CHECK_THROWS_AS(read_container(corrupt(4, '\x7f')), IoError);  // version
    CHECK_THROWS_AS(read_container(corrupt(6, '\x09')), IoError);  // dtype code

    // truncated payload
    const std::string trunc = tmp.file("trunc.usct");
    fs::copy_file(path, trunc, fs::copy_options::overwrite_existing);
    fs::resize_file(trunc, fs::file_size(trunc) - 8);
    CHECK_THROWS_AS(read_container(trunc), IoError);

    CHECK_THROWS_AS(read_container(tmp.file("missing.usct")), IoError);
}

TEST_CASE("field containers carry dims [ny, nx]") {
    TempDir tmp;
    const Grid2D g = make_grid(6, 4, 0.5, 0.0, 0.0);
    ComplexField f(g);
    Rng rng(5);
    for (auto& v : f.values) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const std::string path = tmp.file("cfield.usct");
    write_container(path, to_container(f));
    const ArrayContainer a = read_container(path);
    REQUIRE(a.dims.size() == 2);
    CHECK(a.dims[0] == 4);  // ny
    CHECK(a.dims[1] == 6);  // nx
    const ComplexField back = complex_field_from(a, g);
    CHECK(back.values == f.values);
}
