#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gs/error.hpp"

namespace gs {

// On-disk scalar kinds. In memory everything is held as 32-bit float; f16 and
// i16 payloads are widened on load and narrowed (with validation) on save.
enum class Dtype : uint8_t {
    F32 = 0,
    F16 = 1,
    I16 = 2,
};

const char* dtype_name(Dtype d);

// IEEE binary16 conversion, round-to-nearest-even on narrowing.
uint16_t f32_to_f16_bits(float value);
float f16_bits_to_f32(uint16_t bits);

// Dense row-major tensor, rank 1-4, innermost dimension last.
struct DenseTensor {
    Dtype dtype = Dtype::F32;
    std::vector<uint32_t> shape;
    std::vector<float> data;

    uint32_t rank() const { return static_cast<uint32_t>(shape.size()); }
    uint64_t elem_count() const;

    // Throws Error on invariant violations: rank outside 1..4, zero extents,
    // shape/data mismatch, or values not representable in the tagged dtype.
    void check() const;
};

DenseTensor make_tensor(std::vector<uint32_t> shape, std::vector<float> data,
                        Dtype dtype = Dtype::F32);

// Strict bit-level comparison (shape, dtype, and payload bits).
bool bitwise_equal(const DenseTensor& a, const DenseTensor& b);

// DTNS file format (little-endian, see README):
//   magic "DTNS" | version u16 = 1 | dtype u8 | rank u8 | rank x u32 extents
//   | payload row-major (f32 / f16 / i16 scalars per dtype).
// Writes go to a temp file in the same directory and are renamed into place.
void save_tensor(const DenseTensor& t, const std::string& path);
DenseTensor load_tensor(const std::string& path);

struct UniformDist {
    float lo = 0.0f;
    float hi = 1.0f;
};
struct GaussianDist {
    float mean = 0.0f;
    float stddev = 1.0f;
};
using Distribution = std::variant<UniformDist, GaussianDist>;

// Deterministic synthetic tensor: xoshiro256++ seeded with splitmix64(seed).
// Uniform draws map a 53-bit fraction onto [lo, hi); gaussian draws use one
// Box-Muller cosine term per element (two uniforms consumed each).
// A non-F32 dtype quantizes each value through the target representation.
DenseTensor gen_tensor(const std::vector<uint32_t>& shape, const Distribution& dist,
                       uint64_t seed, Dtype dtype = Dtype::F32);

} // namespace gs
