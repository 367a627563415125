#include "usct/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "usct/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace usct {

namespace {

constexpr char kMagic[4] = {'U', 'S', 'C', 'T'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kMaxRank = 8;

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("container: truncated while reading " + what);
    return v;
}

}  // namespace

std::uint64_t ArrayContainer::element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return dims.empty() ? 0 : n;
}

void write_container(const std::string& path, const ArrayContainer& a) {
    if (a.dims.empty() || a.dims.size() > kMaxRank)
        throw ValidationError("container: rank must be in [1, 8]");
    const std::uint64_t n = a.element_count();
    if (a.dtype == Dtype::Real64 && a.reals.size() != n)
        throw ValidationError("container: real payload size does not match dims");
    if (a.dtype == Dtype::Complex128 && a.cplx.size() != n)
        throw ValidationError("container: complex payload size does not match dims");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("container: cannot open for writing: " + path);
    out.write(kMagic, 4);
    put<std::uint16_t>(out, kVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(a.dtype));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(a.dims.size()));
    for (auto d : a.dims) put<std::uint64_t>(out, d);
    if (a.dtype == Dtype::Real64) {
        out.write(reinterpret_cast<const char*>(a.reals.data()),
                  static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        out.write(reinterpret_cast<const char*>(a.cplx.data()),
                  static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
    }
    if (!out) throw IoError("container: write failed: " + path);
}

ArrayContainer read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("container: cannot open: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("container: bad magic in " + path);
    const auto version = get<std::uint16_t>(in, "version");
    if (version != kVersion)
        throw IoError("container: unsupported version " + std::to_string(version));
    const auto dtype = get<std::uint8_t>(in, "dtype");
    if (dtype > 1) throw IoError("container: unknown dtype code " + std::to_string(dtype));
    const auto rank = get<std::uint8_t>(in, "rank");
    if (rank == 0 || rank > kMaxRank)
        throw IoError("container: rank out of range: " + std::to_string(rank));

    ArrayContainer a;
    a.dtype = static_cast<Dtype>(dtype);
    a.dims.resize(rank);
    for (auto& d : a.dims) d = get<std::uint64_t>(in, "dims");
    const std::uint64_t n = a.element_count();
    if (a.dtype == Dtype::Real64) {
        a.reals.resize(n);
        in.read(reinterpret_cast<char*>(a.reals.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        a.cplx.resize(n);
        in.read(reinterpret_cast<char*>(a.cplx.data()),
                static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
    }
    if (!in) throw IoError("container: truncated payload in " + path);
    // trailing garbage means the producer and the header disagree
    in.peek();
    if (!in.eof()) throw IoError("container: payload longer than header declares in " + path);
    return a;
}

namespace {

template <typename Field, typename Payload>
ArrayContainer field_container(const Field& f, Dtype dtype, Payload ArrayContainer::* member) {
    ArrayContainer a;
    a.dtype = dtype;
    a.dims = {static_cast<std::uint64_t>(f.grid.ny), static_cast<std::uint64_t>(f.grid.nx)};
    a.*member = f.values;
    return a;
}

}  // namespace

ArrayContainer to_container(const RealField& f) {
    return field_container(f, Dtype::Real64, &ArrayContainer::reals);
}

ArrayContainer to_container(const ComplexField& f) {
    return field_container(f, Dtype::Complex128, &ArrayContainer::cplx);
}

namespace {

void check_field_dims(const ArrayContainer& a, const Grid2D& grid) {
    if (a.dims.size() != 2 || a.dims[0] != static_cast<std::uint64_t>(grid.ny) ||
        a.dims[1] != static_cast<std::uint64_t>(grid.nx))
        throw ValidationError("container: dims do not match the grid");
}

}  // namespace

RealField real_field_from(const ArrayContainer& a, const Grid2D& grid) {
    if (a.dtype != Dtype::Real64) throw ValidationError("container: expected real64 payload");
    check_field_dims(a, grid);
    RealField f(grid);
    f.values = a.reals;
    return f;
}

ComplexField complex_field_from(const ArrayContainer& a, const Grid2D& grid) {
    if (a.dtype != Dtype::Complex128)
        throw ValidationError("container: expected complex128 payload");
    check_field_dims(a, grid);
    ComplexField f(grid);
    f.values = a.cplx;
    return f;
}

}  // namespace usct
