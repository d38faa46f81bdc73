#include "gs/tensor.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "gs/rng.hpp"
#include "io_util.hpp"

namespace gs {

namespace {

constexpr char kMagic[4] = {'D', 'T', 'N', 'S'};
constexpr uint16_t kVersion = 1;

uint32_t f32_bits(float f) {
    uint32_t b;
    std::memcpy(&b, &f, sizeof(b));
    return b;
}

float bits_f32(uint32_t b) {
    float f;
    std::memcpy(&f, &b, sizeof(f));
    return f;
}

} // namespace

const char* dtype_name(Dtype d) {
    switch (d) {
        case Dtype::F32: return "f32";
        case Dtype::F16: return "f16";
        case Dtype::I16: return "i16";
    }
    return "unknown";
}

uint16_t f32_to_f16_bits(float value) {
    const uint32_t bits = f32_bits(value);
    const uint32_t sign = (bits >> 16) & 0x8000u;
    const uint32_t abs = bits & 0x7fffffffu;

    if (abs >= 0x7f800000u) { // inf / nan
        const uint32_t mant = (abs > 0x7f800000u) ? 0x0200u : 0;
        return static_cast<uint16_t>(sign | 0x7c00u | mant);
    }
    if (abs >= 0x47800000u) { // too large for f16 -> inf
        return static_cast<uint16_t>(sign | 0x7c00u);
    }
    if (abs < 0x38800000u) { // f16 subnormal or zero
        const uint32_t exp = abs >> 23;
        // Value = mantissa * 2^(exp-150); f16 subnormal unit is 2^-24.
        const int shift = 126 - static_cast<int>(exp);
        if (shift > 24) return static_cast<uint16_t>(sign);
        const uint32_t mant = (abs & 0x007fffffu) | 0x00800000u;
        const int drop = shift - 1; // bits dropped: 23 - (24 - shift)
        const uint32_t q = mant >> (drop + 1);
        const uint32_t half = 1u << drop;
        const uint32_t rem = mant & ((half << 1) - 1);
        uint32_t rounded = q;
        if (rem > half || (rem == half && (q & 1u))) rounded += 1;
        return static_cast<uint16_t>(sign | rounded);
    }
    // Normal range.
    const uint32_t mant = abs & 0x007fffffu;
    const uint32_t exp = (abs >> 23) - 112; // rebias 127 -> 15
    uint32_t q = (exp << 10) | (mant >> 13);
    const uint32_t rem = mant & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (q & 1u))) q += 1; // carry may bump exponent
    return static_cast<uint16_t>(sign | q);
}

float f16_bits_to_f32(uint16_t bits) {
    const uint32_t sign = static_cast<uint32_t>(bits & 0x8000u) << 16;
    const uint32_t exp = (bits >> 10) & 0x1fu;
    const uint32_t mant = bits & 0x3ffu;

    if (exp == 0) {
        if (mant == 0) return bits_f32(sign);
        const float v = static_cast<float>(mant) * 0x1.0p-24f;
        return (sign != 0) ? -v : v;
    }
    if (exp == 0x1f) {
        return bits_f32(sign | 0x7f800000u | (mant << 13));
    }
    return bits_f32(sign | ((exp + 112) << 23) | (mant << 13));
}

uint64_t DenseTensor::elem_count() const {
    if (shape.empty()) return 0;
    uint64_t n = 1;
    for (uint32_t e : shape) n *= e;
    return n;
}

void DenseTensor::check() const {
    if (rank() < 1 || rank() > 4)
        throw Error("tensor rank " + std::to_string(rank()) + " outside supported range 1..4");
    for (uint32_t e : shape)
        if (e == 0) throw Error("tensor shape has zero extent");
    if (elem_count() != data.size())
        throw Error("tensor payload size " + std::to_string(data.size()) +
                    " does not match shape element count " + std::to_string(elem_count()));
    if (dtype == Dtype::F16) {
        for (size_t i = 0; i < data.size(); ++i) {
            if (f32_bits(f16_bits_to_f32(f32_to_f16_bits(data[i]))) != f32_bits(data[i]))
                throw Error("f16 tensor holds value not representable in binary16 at element " +
                            std::to_string(i));
        }
    } else if (dtype == Dtype::I16) {
        for (size_t i = 0; i < data.size(); ++i) {
            const float v = data[i];
            if (v != std::floor(v) || v < -32768.0f || v > 32767.0f)
                throw Error("i16 tensor holds non-integral or out-of-range value at element " +
                            std::to_string(i));
        }
    }
}

DenseTensor make_tensor(std::vector<uint32_t> shape, std::vector<float> data, Dtype dtype) {
    DenseTensor t;
    t.dtype = dtype;
    t.shape = std::move(shape);
    t.data = std::move(data);
    t.check();
    return t;
}

bool bitwise_equal(const DenseTensor& a, const DenseTensor& b) {
    if (a.dtype != b.dtype || a.shape != b.shape || a.data.size() != b.data.size()) return false;
    return a.data.empty() ||
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0;
}

void save_tensor(const DenseTensor& t, const std::string& path) {
    t.check();
    std::vector<uint8_t> out;
    out.reserve(8 + 4 * t.shape.size() + 4 * t.data.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u16(out, kVersion);
    out.push_back(static_cast<uint8_t>(t.dtype));
    out.push_back(static_cast<uint8_t>(t.rank()));
    for (uint32_t e : t.shape) append_u32(out, e);
    switch (t.dtype) {
        case Dtype::F32:
            for (float v : t.data) append_f32(out, v);
            break;
        case Dtype::F16:
            for (float v : t.data) append_u16(out, f32_to_f16_bits(v));
            break;
        case Dtype::I16:
            for (float v : t.data)
                append_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
            break;
    }
    atomic_write_file(path, out);
}

DenseTensor load_tensor(const std::string& path) {
    const std::vector<uint8_t> bytes = read_file_bytes(path);
    ByteReader r{bytes};

    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("bad magic in " + path + " (expected \"DTNS\")");
    r.pos = 4;
    const uint16_t version = r.u16("version");
    if (version != kVersion)
        throw FormatError("unsupported DTNS version " + std::to_string(version));
    const uint8_t dtype_byte = r.u8("dtype");
    if (dtype_byte > 2) throw FormatError("unknown dtype code " + std::to_string(dtype_byte));
    const uint8_t rank = r.u8("rank");
    if (rank < 1 || rank > 4) throw FormatError("rank " + std::to_string(rank) + " outside 1..4");

    DenseTensor t;
    t.dtype = static_cast<Dtype>(dtype_byte);
    t.shape.resize(rank);
    uint64_t count = 1;
    for (uint8_t i = 0; i < rank; ++i) {
        t.shape[i] = r.u32("extents");
        if (t.shape[i] == 0) throw FormatError("zero extent in shape");
        count *= t.shape[i];
    }

    t.data.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        switch (t.dtype) {
            case Dtype::F32: t.data.push_back(r.f32("payload")); break;
            case Dtype::F16: t.data.push_back(f16_bits_to_f32(r.u16("payload"))); break;
            case Dtype::I16:
                t.data.push_back(static_cast<float>(static_cast<int16_t>(r.u16("payload"))));
                break;
        }
    }
    if (r.pos != bytes.size()) throw FormatError("trailing bytes after payload in " + path);
    return t;
}

DenseTensor gen_tensor(const std::vector<uint32_t>& shape, const Distribution& dist,
                       uint64_t seed, Dtype dtype) {
    if (shape.empty() || shape.size() > 4) throw Error("gen_tensor: rank must be 1..4");
    for (uint32_t e : shape)
        if (e == 0) throw Error("gen_tensor: zero extent in shape");

    uint64_t count = 1;
    for (uint32_t e : shape) count *= e;

    Xoshiro256pp rng(seed);
    std::vector<float> data;
    data.reserve(count);
    if (const auto* u = std::get_if<UniformDist>(&dist)) {
        if (!(u->lo < u->hi)) throw Error("gen_tensor: uniform requires lo < hi");
        const double lo = u->lo, span = static_cast<double>(u->hi) - u->lo;
        for (uint64_t i = 0; i < count; ++i)
            data.push_back(static_cast<float>(lo + span * rng.next_double()));
    } else {
        const auto& g = std::get<GaussianDist>(dist);
        if (!(g.stddev >= 0)) throw Error("gen_tensor: gaussian stddev must be >= 0");
        for (uint64_t i = 0; i < count; ++i) {
            // Box-Muller, cosine branch only; u1 shifted away from zero.
            const double u1 = 1.0 - rng.next_double();
            const double u2 = rng.next_double();
            const double z =
                std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            data.push_back(static_cast<float>(g.mean + g.stddev * z));
        }
    }

    if (dtype == Dtype::F16) {
        for (float& v : data) v = f16_bits_to_f32(f32_to_f16_bits(v));
    } else if (dtype == Dtype::I16) {
        for (float& v : data) {
            float q = std::nearbyint(v);
            if (q < -32768.0f) q = -32768.0f;
            if (q > 32767.0f) q = 32767.0f;
            v = q;
        }
    }
    return make_tensor(shape, std::move(data), dtype);
}

} // namespace gs
