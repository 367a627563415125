#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "usct/field.hpp"

namespace usct {

// On-disk array format. Little-endian throughout:
//   bytes 0..3   magic "USCT"
//   bytes 4..5   version, u16 (currently 1)
//   byte  6      dtype, u8: 0 = real64, 1 = complex128
//   byte  7      rank, u8
//   then rank x u64 dims, then the payload row-major (last dim fastest),
//   complex stored as (re, im) doubles.
// Header size is 8 + 8*rank bytes; payload length must equal
// element_size * product(dims).
enum class Dtype : std::uint8_t { Real64 = 0, Complex128 = 1 };

struct ArrayContainer {
    Dtype dtype = Dtype::Real64;
    std::vector<std::uint64_t> dims;
    std::vector<double> reals;                 // valid when dtype == Real64
    std::vector<std::complex<double>> cplx;    // valid when dtype == Complex128

    std::uint64_t element_count() const;
};

void write_container(const std::string& path, const ArrayContainer& a);
ArrayContainer read_container(const std::string& path);

// Field <-> container helpers. Fields are stored rank-2 with dims [ny, nx];
// grid geometry travels in JSON sidecars, not in the container.
ArrayContainer to_container(const RealField& f);
ArrayContainer to_container(const ComplexField& f);
RealField real_field_from(const ArrayContainer& a, const Grid2D& grid);
ComplexField complex_field_from(const ArrayContainer& a, const Grid2D& grid);

}  // namespace usct
