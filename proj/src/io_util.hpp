#pragma once

// Internal little-endian byte packing and atomic file helpers shared by the
// DTNS/GSSF/trace codecs.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "gs/error.hpp"

namespace gs {

void atomic_write_file(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file_bytes(const std::string& path);

inline void append_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void append_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

inline void append_f32(std::vector<uint8_t>& out, float f) {
    uint32_t b;
    std::memcpy(&b, &f, sizeof(b));
    append_u32(out, b);
}

struct ByteReader {
    const std::vector<uint8_t>& bytes;
    size_t pos = 0;

    void need(size_t n, const char* field) {
        if (pos + n > bytes.size())
            throw FormatError(std::string("truncated file while reading ") + field);
    }
    uint8_t u8(const char* field) {
        need(1, field);
        return bytes[pos++];
    }
    uint16_t u16(const char* field) {
        need(2, field);
        uint16_t v =
            static_cast<uint16_t>(bytes[pos]) | (static_cast<uint16_t>(bytes[pos + 1]) << 8);
        pos += 2;
        return v;
    }
    uint32_t u32(const char* field) {
        need(4, field);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    float f32(const char* field) {
        const uint32_t b = u32(field);
        float f;
        std::memcpy(&f, &b, sizeof(f));
        return f;
    }
};

} // namespace gs
