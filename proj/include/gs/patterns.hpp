#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gs/error.hpp"
#include "gs/tensor.hpp"

namespace gs {

enum class PatternFamily : uint8_t {
    GsHybrid = 0,  // GS(B,k); k == B is horizontal, k == 1 is vertical
    GsScatter = 1, // GS(B,k) after a row permutation
    Block = 2,     // grid-aligned blocks, k wide x B/k tall
    Irregular = 3, // unconstrained per-element
};

const char* family_name(PatternFamily f);

struct PatternDescriptor {
    PatternFamily family = PatternFamily::GsHybrid;
    uint32_t banks = 0;         // B
    uint32_t elems_per_row = 0; // k

    bool is_horizontal() const { return elems_per_row == banks; }
    bool is_vertical() const { return elems_per_row == 1; }
    uint32_t band_rows() const { return banks / elems_per_row; }

    // Throws Error unless B,k >= 1 and k | B (irregular ignores B,k).
    void check() const;
};

// CLI flag grammar: "gs:B=8,k=1", "gs-scatter:B=8,k=2", "block:B=8,k=8",
// "irregular".
PatternDescriptor parse_pattern_flag(const std::string& flag);
std::string pattern_to_string(const PatternDescriptor& p);

struct MaskMatrix {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<uint8_t> bits; // row-major 0/1

    static MaskMatrix zeros(uint32_t rows, uint32_t cols);
    uint8_t at(uint32_t r, uint32_t c) const { return bits[size_t(r) * cols + c]; }
    void set(uint32_t r, uint32_t c, uint8_t v) { bits[size_t(r) * cols + c] = v; }
    uint64_t nnz() const;
};

// Conversion to/from 0/1 f32 tensors (strict: values must be exactly 0 or 1).
MaskMatrix mask_from_tensor(const DenseTensor& t);
DenseTensor mask_to_tensor(const MaskMatrix& m);

// Convolution filter geometry: OhwI (2-D) or OLI (1-D; kernel_h == 1 and
// kernel_w plays the role of L). act_width is the activation W the offsets
// are computed against; act_channels must equal in_channels.
struct ConvGeometry {
    enum class Layout : uint8_t { OhwI = 0, OLI = 1 };
    Layout layout = Layout::OhwI;
    uint32_t out_channels = 0;
    uint32_t kernel_h = 0;
    uint32_t kernel_w = 0;
    uint32_t in_channels = 0;
    uint32_t act_width = 0;    // W
    uint32_t act_channels = 0; // C, must equal in_channels

    uint32_t flat_cols() const { return kernel_h * kernel_w * in_channels; }
    void check() const;
};

struct ValidationReport {
    bool valid = true;
    std::string detail;  // empty when valid
    int64_t band = -1;   // first violating band, when applicable
    int64_t row = -1;    // first violating row, when applicable
    int64_t residue = -1;
};

// Element-wise cols[i] mod banks, order preserved.
std::vector<uint32_t> residues(const std::vector<uint32_t>& cols, uint32_t banks);

// Per-residue non-zero counts over the whole mask (CLI stats histogram).
std::vector<uint64_t> residue_histogram(const MaskMatrix& mask, uint32_t banks);

// Checks both balance properties per band of B/k consecutive rows: equal
// per-row counts and equal per-residue totals. Preconditions (thrown):
// family GsHybrid, B/k divides rows.
ValidationReport validate_gs_mask(const MaskMatrix& mask, const PatternDescriptor& p);

// row_perm[i] = original row placed at banded position i. Valid iff the
// permuted mask passes validate_gs_mask.
ValidationReport validate_scatter_mask(const MaskMatrix& mask, const PatternDescriptor& p,
                                       const std::vector<uint32_t>& row_perm);

// Valid iff the mask is a union of all-ones (B/k)x(k) blocks on the fixed
// grid (block origins at row multiples of B/k, col multiples of k).
ValidationReport validate_block_mask(const MaskMatrix& mask, const PatternDescriptor& p);

// Filter tap coordinate within one output channel's filter.
struct FilterCoord {
    uint32_t y = 0; // kernel row (0 for OLI)
    uint32_t x = 0; // kernel col (position in L for OLI)
    uint32_t c = 0; // input channel
};

// Row o, col (y*w + x)*I + c  <->  (o,y,x,c); throws on out-of-range coords.
uint32_t flatten_col(const ConvGeometry& g, uint32_t y, uint32_t x, uint32_t c);
FilterCoord unflatten_col(const ConvGeometry& g, uint32_t col);

// Activation-relative element offset of tap (y,x,c) against the window
// origin: y*W*C + x*C + c.
uint32_t conv_activation_offset(const ConvGeometry& g, uint32_t y, uint32_t x, uint32_t c);

// Compose flatten/offset both ways for stored indices.
uint32_t column_to_offset(const ConvGeometry& g, uint32_t col);
uint32_t offset_to_column(const ConvGeometry& g, uint32_t offset);

} // namespace gs
