#include "gs/patterns.hpp"

#include <algorithm>
#include <cstdio>

namespace gs {

const char* family_name(PatternFamily f) {
    switch (f) {
        case PatternFamily::GsHybrid: return "gs";
        case PatternFamily::GsScatter: return "gs-scatter";
        case PatternFamily::Block: return "block";
        case PatternFamily::Irregular: return "irregular";
    }
    return "unknown";
}

void PatternDescriptor::check() const {
    if (family == PatternFamily::Irregular) return;
    if (banks == 0) throw Error("pattern: banks must be >= 1");
    if (elems_per_row == 0) throw Error("pattern: k must be >= 1");
    if (banks % elems_per_row != 0)
        throw Error("pattern: k=" + std::to_string(elems_per_row) + " does not divide B=" +
                    std::to_string(banks));
}

namespace {

// Parses "B=<int>,k=<int>".
void parse_bk(const std::string& body, const std::string& flag, PatternDescriptor& p) {
    unsigned b = 0, k = 0;
    char trail = 0;
    if (std::sscanf(body.c_str(), "B=%u,k=%u%c", &b, &k, &trail) != 2)
        throw Error("bad pattern flag '" + flag + "' (expected e.g. gs:B=8,k=1)");
    p.banks = b;
    p.elems_per_row = k;
}

} // namespace

PatternDescriptor parse_pattern_flag(const std::string& flag) {
    PatternDescriptor p;
    if (flag == "irregular") {
        p.family = PatternFamily::Irregular;
        return p;
    }
    const size_t colon = flag.find(':');
    if (colon == std::string::npos)
        throw Error("bad pattern flag '" + flag + "'");
    const std::string head = flag.substr(0, colon);
    const std::string body = flag.substr(colon + 1);
    if (head == "gs")
        p.family = PatternFamily::GsHybrid;
    else if (head == "gs-scatter")
        p.family = PatternFamily::GsScatter;
    else if (head == "block")
        p.family = PatternFamily::Block;
    else
        throw Error("unknown pattern family '" + head + "'");
    parse_bk(body, flag, p);
    p.check();
    return p;
}

std::string pattern_to_string(const PatternDescriptor& p) {
    if (p.family == PatternFamily::Irregular) return "irregular";
    return std::string(family_name(p.family)) + ":B=" + std::to_string(p.banks) +
           ",k=" + std::to_string(p.elems_per_row);
}

MaskMatrix MaskMatrix::zeros(uint32_t rows, uint32_t cols) {
    MaskMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.bits.assign(size_t(rows) * cols, 0);
    return m;
}

uint64_t MaskMatrix::nnz() const {
    uint64_t n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

MaskMatrix mask_from_tensor(const DenseTensor& t) {
    if (t.rank() != 2) throw Error("mask tensor must be rank 2");
    MaskMatrix m = MaskMatrix::zeros(t.shape[0], t.shape[1]);
    for (size_t i = 0; i < t.data.size(); ++i) {
        if (t.data[i] == 0.0f)
            m.bits[i] = 0;
        else if (t.data[i] == 1.0f)
            m.bits[i] = 1;
        else
            throw Error("mask tensor holds value other than 0/1 at element " + std::to_string(i));
    }
    return m;
}

DenseTensor mask_to_tensor(const MaskMatrix& m) {
    std::vector<float> data(m.bits.begin(), m.bits.end());
    return make_tensor({m.rows, m.cols}, std::move(data));
}

void ConvGeometry::check() const {
    if (out_channels == 0 || kernel_h == 0 || kernel_w == 0 || in_channels == 0 ||
        act_width == 0 || act_channels == 0)
        throw Error("conv geometry: all extents must be positive");
    if (layout == Layout::OLI && kernel_h != 1)
        throw Error("conv geometry: OLI layout requires kernel_h == 1");
    if (act_channels != in_channels)
        throw Error("conv geometry: act_channels must equal in_channels");
    if (act_width < kernel_w)
        throw Error("conv geometry: act_width smaller than kernel width");
}

std::vector<uint32_t> residues(const std::vector<uint32_t>& cols, uint32_t banks) {
    if (banks == 0) throw Error("residues: banks must be >= 1");
    std::vector<uint32_t> out;
    out.reserve(cols.size());
    for (uint32_t c : cols) out.push_back(c % banks);
    return out;
}

std::vector<uint64_t> residue_histogram(const MaskMatrix& mask, uint32_t banks) {
    if (banks == 0) throw Error("residue_histogram: banks must be >= 1");
    std::vector<uint64_t> counts(banks, 0);
    for (uint32_t r = 0; r < mask.rows; ++r)
        for (uint32_t c = 0; c < mask.cols; ++c)
            if (mask.at(r, c)) counts[c % banks]++;
    return counts;
}

ValidationReport validate_gs_mask(const MaskMatrix& mask, const PatternDescriptor& p) {
    p.check();
    if (p.family != PatternFamily::GsHybrid)
        throw Error("validate_gs_mask: descriptor family must be gs");
    const uint32_t band_rows = p.band_rows();
    if (mask.rows % band_rows != 0)
        throw Error("validate_gs_mask: rows " + std::to_string(mask.rows) +
                    " not divisible by band size " + std::to_string(band_rows));

    ValidationReport rep;
    const uint32_t bands = mask.rows / band_rows;
    std::vector<uint64_t> row_counts(band_rows);
    std::vector<uint64_t> res_counts(p.banks);
    for (uint32_t band = 0; band < bands; ++band) {
        std::fill(row_counts.begin(), row_counts.end(), 0);
        std::fill(res_counts.begin(), res_counts.end(), 0);
        for (uint32_t lr = 0; lr < band_rows; ++lr) {
            const uint32_t r = band * band_rows + lr;
            for (uint32_t c = 0; c < mask.cols; ++c) {
                if (mask.at(r, c)) {
                    row_counts[lr]++;
                    res_counts[c % p.banks]++;
                }
            }
        }
        for (uint32_t lr = 1; lr < band_rows; ++lr) {
            if (row_counts[lr] != row_counts[0]) {
                rep.valid = false;
                rep.band = band;
                rep.row = band * band_rows + lr;
                rep.detail = "band " + std::to_string(band) + ": row " +
                             std::to_string(band * band_rows + lr) + " has " +
                             std::to_string(row_counts[lr]) + " non-zeros, row " +
                             std::to_string(band * band_rows) + " has " +
                             std::to_string(row_counts[0]);
                return rep;
            }
        }
        for (uint32_t b = 1; b < p.banks; ++b) {
            if (res_counts[b] != res_counts[0]) {
                rep.valid = false;
                rep.band = band;
                rep.residue = b;
                rep.detail = "band " + std::to_string(band) + ": residue " + std::to_string(b) +
                             " count " + std::to_string(res_counts[b]) + " != residue 0 count " +
                             std::to_string(res_counts[0]);
                return rep;
            }
        }
    }
    return rep;
}

ValidationReport validate_scatter_mask(const MaskMatrix& mask, const PatternDescriptor& p,
                                       const std::vector<uint32_t>& row_perm) {
    if (row_perm.size() != mask.rows)
        throw Error("validate_scatter_mask: row_perm length != rows");
    std::vector<uint8_t> seen(mask.rows, 0);
    for (uint32_t r : row_perm) {
        if (r >= mask.rows || seen[r])
            throw Error("validate_scatter_mask: row_perm is not a permutation of 0.." +
                        std::to_string(mask.rows - 1));
        seen[r] = 1;
    }

    MaskMatrix permuted = MaskMatrix::zeros(mask.rows, mask.cols);
    for (uint32_t i = 0; i < mask.rows; ++i)
        for (uint32_t c = 0; c < mask.cols; ++c)
            permuted.set(i, c, mask.at(row_perm[i], c));

    PatternDescriptor gs = p;
    gs.family = PatternFamily::GsHybrid;
    return validate_gs_mask(permuted, gs);
}

ValidationReport validate_block_mask(const MaskMatrix& mask, const PatternDescriptor& p) {
    p.check();
    const uint32_t block_h = p.band_rows();
    const uint32_t block_w = p.elems_per_row;
    if (mask.rows % block_h != 0)
        throw Error("validate_block_mask: rows " + std::to_string(mask.rows) +
                    " not divisible by block height " + std::to_string(block_h));
    if (mask.cols % block_w != 0)
        throw Error("validate_block_mask: cols " + std::to_string(mask.cols) +
                    " not divisible by block width " + std::to_string(block_w));

    ValidationReport rep;
    for (uint32_t br = 0; br < mask.rows / block_h; ++br) {
        for (uint32_t bc = 0; bc < mask.cols / block_w; ++bc) {
            uint64_t count = 0;
            for (uint32_t i = 0; i < block_h; ++i)
                for (uint32_t j = 0; j < block_w; ++j)
                    count += mask.at(br * block_h + i, bc * block_w + j);
            if (count != 0 && count != uint64_t(block_h) * block_w) {
                rep.valid = false;
                rep.band = br;
                rep.detail = "block (" + std::to_string(br) + "," + std::to_string(bc) +
                             ") is partially filled (" + std::to_string(count) + " of " +
                             std::to_string(uint64_t(block_h) * block_w) + ")";
                return rep;
            }
        }
    }
    return rep;
}

uint32_t flatten_col(const ConvGeometry& g, uint32_t y, uint32_t x, uint32_t c) {
    g.check();
    if (y >= g.kernel_h || x >= g.kernel_w || c >= g.in_channels)
        throw Error("flatten_col: tap coordinate out of range");
    return (y * g.kernel_w + x) * g.in_channels + c;
}

FilterCoord unflatten_col(const ConvGeometry& g, uint32_t col) {
    g.check();
    if (col >= g.flat_cols()) throw Error("unflatten_col: column out of range");
    FilterCoord fc;
    fc.c = col % g.in_channels;
    const uint32_t yx = col / g.in_channels;
    fc.x = yx % g.kernel_w;
    fc.y = yx / g.kernel_w;
    return fc;
}

uint32_t conv_activation_offset(const ConvGeometry& g, uint32_t y, uint32_t x, uint32_t c) {
    g.check();
    if (y >= g.kernel_h || x >= g.kernel_w || c >= g.act_channels)
        throw Error("conv_activation_offset: tap coordinate out of range");
    const uint64_t off = uint64_t(y) * g.act_width * g.act_channels +
                         uint64_t(x) * g.act_channels + c;
    if (off > 0xffffffffull) throw Error("conv_activation_offset: offset exceeds 32 bits");
    return static_cast<uint32_t>(off);
}

uint32_t column_to_offset(const ConvGeometry& g, uint32_t col) {
    const FilterCoord fc = unflatten_col(g, col);
    return conv_activation_offset(g, fc.y, fc.x, fc.c);
}

uint32_t offset_to_column(const ConvGeometry& g, uint32_t offset) {
    g.check();
    const uint32_t row_stride = g.act_width * g.act_channels;
    const uint32_t y = offset / row_stride;
    const uint32_t rem = offset % row_stride;
    const uint32_t x = rem / g.act_channels;
    const uint32_t c = rem % g.act_channels;
    if (y >= g.kernel_h || x >= g.kernel_w)
        throw Error("offset_to_column: offset " + std::to_string(offset) +
                    " does not map to a filter tap");
    return flatten_col(g, y, x, c);
}

} // namespace gs
