#include "gs/gsformat.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "io_util.hpp"

namespace gs {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'S', 'F'};
constexpr uint16_t kVersion = 1;

std::vector<uint32_t> inverse_perm(const std::vector<uint32_t>& perm) {
    std::vector<uint32_t> inv(perm.size());
    for (uint32_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    return inv;
}

void check_perm(const std::vector<uint32_t>& perm, uint32_t rows, const char* who) {
    if (perm.size() != rows)
        throw Error(std::string(who) + ": row_perm length != rows");
    std::vector<uint8_t> seen(rows, 0);
    for (uint32_t r : perm) {
        if (r >= rows || seen[r])
            throw Error(std::string(who) + ": row_perm is not a permutation");
        seen[r] = 1;
    }
}

} // namespace

void GsBsrMatrix::check() const {
    pattern.check();
    if (pattern.family == PatternFamily::Irregular)
        throw Error("gsbsr: irregular patterns have no compact grouping");
    if (pattern.family == PatternFamily::Block && pattern.elems_per_row != pattern.banks)
        throw Error("gsbsr: block patterns are encodable only with k == B");
    if (rows == 0 || cols == 0) throw Error("gsbsr: empty dimensions");
    const uint32_t brows = band_rows();
    if (rows % brows != 0)
        throw Error("gsbsr: rows " + std::to_string(rows) + " not divisible by band size " +
                    std::to_string(brows));
    if (indptr.size() != size_t(band_count()) + 1)
        throw Error("gsbsr: indptr length " + std::to_string(indptr.size()) + " != band count + 1");
    if (indptr.front() != 0) throw Error("gsbsr: indptr[0] != 0");
    for (size_t i = 1; i < indptr.size(); ++i)
        if (indptr[i] < indptr[i - 1]) throw Error("gsbsr: indptr not non-decreasing");
    const uint64_t groups = indptr.back();
    const uint32_t B = banks();
    if (values.size() != groups * B || indices.size() != groups * B)
        throw Error("gsbsr: value/index table size does not match group count");
    if (conv) {
        conv->check();
        if (conv->flat_cols() != cols)
            throw Error("gsbsr: conv geometry flattens to " + std::to_string(conv->flat_cols()) +
                        " cols, matrix has " + std::to_string(cols));
        if (conv->out_channels != rows)
            throw Error("gsbsr: conv out_channels != rows");
    }
    if (pattern.family == PatternFamily::GsScatter) {
        if (!row_perm) throw Error("gsbsr: scatter matrix missing row_perm");
        check_perm(*row_perm, rows, "gsbsr");
    } else if (row_perm) {
        throw Error("gsbsr: row_perm present on non-scatter matrix");
    }

    const uint32_t k = elems_per_row();
    std::vector<uint8_t> used(B);
    for (uint64_t g = 0; g < groups; ++g) {
        std::fill(used.begin(), used.end(), 0);
        uint32_t prev_col = 0;
        for (uint32_t j = 0; j < B; ++j) {
            const uint32_t idx = indices[g * B + j];
            uint32_t col = idx;
            if (conv) col = offset_to_column(*conv, idx); // throws on stray offsets
            if (col >= cols)
                throw Error("gsbsr: group " + std::to_string(g) + " index " + std::to_string(idx) +
                            " out of range");
            const uint32_t res = idx % B;
            if (used[res])
                throw Error("gsbsr: group " + std::to_string(g) + " has duplicated residue " +
                            std::to_string(res));
            used[res] = 1;
            if (j % k != 0 && col <= prev_col)
                throw Error("gsbsr: group " + std::to_string(g) +
                            " columns not ascending within a row segment");
            prev_col = col;
        }
    }
}

GsBsrMatrix encode(const DenseTensor& w2d, const GroupedMask& gm, const PatternDescriptor& p,
                   const std::optional<ConvGeometry>& conv) {
    w2d.check();
    if (w2d.rank() != 2) throw Error("encode: weight tensor must be rank 2");
    p.check();
    if (p.family == PatternFamily::Irregular)
        throw Error("encode: irregular patterns have no compact grouping");
    if (p.family == PatternFamily::Block && p.elems_per_row != p.banks)
        throw Error("encode: block patterns are encodable only with k == B");
    const uint32_t m = w2d.shape[0], n = w2d.shape[1];
    if (gm.mask.rows != m || gm.mask.cols != n) throw Error("encode: mask/weight shape mismatch");
    const uint32_t B = p.banks;
    const uint32_t k = p.elems_per_row;
    const uint32_t brows = p.band_rows();
    if (gm.band_rows != brows)
        throw Error("encode: grouped mask band size " + std::to_string(gm.band_rows) +
                    " does not match pattern");
    if (m % brows != 0) throw Error("encode: rows not divisible by band size");
    if (conv) {
        conv->check();
        if (conv->flat_cols() != n || conv->out_channels != m)
            throw Error("encode: conv geometry inconsistent with matrix shape");
    }

    const bool scatter = (p.family == PatternFamily::GsScatter);
    if (scatter && !gm.row_perm) throw Error("encode: scatter pattern requires row_perm");
    if (!scatter && gm.row_perm) throw Error("encode: row_perm given for non-scatter pattern");
    std::vector<uint32_t> inv;
    if (scatter) {
        check_perm(*gm.row_perm, m, "encode");
        inv = inverse_perm(*gm.row_perm);
    }
    const auto banded_row = [&](uint32_t row) { return scatter ? inv[row] : row; };

    GsBsrMatrix out;
    out.pattern = p;
    out.rows = m;
    out.cols = n;
    out.conv = conv;
    if (scatter) out.row_perm = gm.row_perm;
    out.indptr.assign(size_t(m / brows) + 1, 0);
    out.values.reserve(gm.groups.size() * B);
    out.indices.reserve(gm.groups.size() * B);

    std::vector<uint8_t> coord_seen(size_t(m) * n, 0);
    std::vector<uint8_t> used(B);
    int64_t prev_band = -1;
    uint64_t covered = 0;
    for (size_t gi = 0; gi < gm.groups.size(); ++gi) {
        const auto& group = gm.groups[gi];
        const std::string where = "encode: group " + std::to_string(gi);
        if (group.size() != B) throw Error(where + " has " + std::to_string(group.size()) +
                                           " entries, expected " + std::to_string(B));
        std::fill(used.begin(), used.end(), 0);
        const uint32_t band = banded_row(group[0].row) / brows;
        if (int64_t(band) < prev_band) throw Error(where + " out of band order");
        prev_band = band;

        uint32_t prev_local = 0, prev_col = 0;
        for (uint32_t j = 0; j < B; ++j) {
            const Coord& coord = group[j];
            if (coord.row >= m || coord.col >= n) throw Error(where + " coordinate out of range");
            if (!gm.mask.at(coord.row, coord.col))
                throw Error(where + " contains a masked-out coordinate");
            uint8_t& seen = coord_seen[size_t(coord.row) * n + coord.col];
            if (seen) throw Error(where + " repeats coordinate already grouped");
            seen = 1;
            covered++;

            const uint32_t brow = banded_row(coord.row);
            if (brow / brows != band) throw Error(where + " spans multiple bands");
            const uint32_t local = brow % brows;
            if (local != j / k)
                throw Error(where + " not in canonical (band row, column) order");
            if (j > 0 && local == prev_local && coord.col <= prev_col)
                throw Error(where + " columns not ascending within a row");
            prev_local = local;
            prev_col = coord.col;

            const uint32_t res = coord.col % B;
            if (used[res])
                throw Error(where + " has duplicated residue " + std::to_string(res));
            used[res] = 1;

            const uint32_t idx = conv ? column_to_offset(*conv, coord.col) : coord.col;
            out.values.push_back(w2d.data[size_t(coord.row) * n + coord.col]);
            out.indices.push_back(idx);
        }
        if (conv) {
            std::fill(used.begin(), used.end(), 0);
            for (uint32_t j = 0; j < B; ++j) {
                const uint32_t res = out.indices[gi * B + j] % B;
                if (used[res])
                    throw Error(where + " offsets collide in bank " + std::to_string(res) +
                                " under the conv geometry");
                used[res] = 1;
            }
        }
        out.indptr[band + 1]++;
    }
    if (covered != gm.mask.nnz())
        throw Error("encode: groups cover " + std::to_string(covered) + " coordinates, mask has " +
                    std::to_string(gm.mask.nnz()));
    for (size_t i = 1; i < out.indptr.size(); ++i) out.indptr[i] += out.indptr[i - 1];
    return out;
}

DenseTensor decode(const GsBsrMatrix& g) {
    g.check();
    const uint32_t m = g.rows, n = g.cols, B = g.banks(), k = g.elems_per_row();
    const uint32_t brows = g.band_rows();
    std::vector<float> dense(size_t(m) * n, 0.0f);
    std::vector<uint8_t> seen(size_t(m) * n, 0);
    for (uint32_t band = 0; band < g.band_count(); ++band) {
        for (uint32_t gi = g.indptr[band]; gi < g.indptr[band + 1]; ++gi) {
            for (uint32_t j = 0; j < B; ++j) {
                const uint32_t idx = g.indices[size_t(gi) * B + j];
                const uint32_t col = g.conv ? offset_to_column(*g.conv, idx) : idx;
                const uint32_t banded = band * brows + j / k;
                const uint32_t row = g.row_perm ? (*g.row_perm)[banded] : banded;
                uint8_t& s = seen[size_t(row) * n + col];
                if (s)
                    throw Error("decode: duplicate coordinate at row " + std::to_string(row) +
                                " col " + std::to_string(col));
                s = 1;
                dense[size_t(row) * n + col] = g.values[size_t(gi) * B + j];
            }
        }
    }
    return make_tensor({m, n}, std::move(dense));
}

namespace {

// Peels perfect matchings from one band's bipartite multigraph. Left nodes
// are row slots (k per band row), right nodes are residues; each edge is a
// mask coordinate.
struct BandMatcher {
    struct Edge {
        uint32_t residue;
        uint32_t local_row;
        uint32_t col;
        bool alive = true;
    };
    uint32_t banks;
    std::vector<std::vector<Edge>> adj; // per slot, column-ascending
    std::vector<int64_t> match_slot;    // residue -> slot
    std::vector<size_t> match_edge;     // residue -> edge index in adj[slot]

    explicit BandMatcher(uint32_t banks_) : banks(banks_), adj(banks_) {}

    bool augment(uint32_t slot, std::vector<uint8_t>& visited) {
        for (size_t ei = 0; ei < adj[slot].size(); ++ei) {
            Edge& e = adj[slot][ei];
            if (!e.alive || visited[e.residue]) continue;
            visited[e.residue] = 1;
            if (match_slot[e.residue] < 0 ||
                augment(static_cast<uint32_t>(match_slot[e.residue]), visited)) {
                match_slot[e.residue] = slot;
                match_edge[e.residue] = ei;
                return true;
            }
        }
        return false;
    }

    // Returns one perfect matching as (local_row, col) pairs and removes its
    // edges; throws if no perfect matching exists.
    std::vector<Coord> peel() {
        match_slot.assign(banks, -1);
        match_edge.assign(banks, 0);
        std::vector<uint8_t> visited(banks);
        for (uint32_t slot = 0; slot < banks; ++slot) {
            std::fill(visited.begin(), visited.end(), 0);
            if (!augment(slot, visited))
                throw Error("group_mask: internal matching failure (mask not balanced)");
        }
        std::vector<Coord> coords;
        coords.reserve(banks);
        for (uint32_t res = 0; res < banks; ++res) {
            Edge& e = adj[static_cast<size_t>(match_slot[res])][match_edge[res]];
            e.alive = false;
            coords.push_back({e.local_row, e.col});
        }
        return coords;
    }
};

} // namespace

GroupedMask group_mask(const MaskMatrix& mask, const PatternDescriptor& p) {
    p.check();
    if (p.family != PatternFamily::GsHybrid)
        throw Error("group_mask: descriptor family must be gs");
    const ValidationReport rep = validate_gs_mask(mask, p);
    if (!rep.valid) throw Error("group_mask: invalid mask: " + rep.detail);

    const uint32_t B = p.banks, k = p.elems_per_row, brows = p.band_rows();
    GroupedMask out;
    out.mask = mask;
    out.band_rows = brows;

    if (k == B) {
        // Horizontal: zip column-sorted residue buckets round-robin.
        std::vector<std::vector<uint32_t>> buckets(B);
        for (uint32_t row = 0; row < mask.rows; ++row) {
            for (auto& b : buckets) b.clear();
            for (uint32_t col = 0; col < mask.cols; ++col)
                if (mask.at(row, col)) buckets[col % B].push_back(col);
            const uint64_t group_count = buckets[0].size();
            for (uint64_t g = 0; g < group_count; ++g) {
                std::vector<Coord> group;
                group.reserve(B);
                for (uint32_t b = 0; b < B; ++b) group.push_back({row, buckets[b][g]});
                std::sort(group.begin(), group.end(),
                          [](const Coord& a, const Coord& b) { return a.col < b.col; });
                out.groups.push_back(std::move(group));
            }
        }
        return out;
    }

    for (uint32_t band = 0; band < mask.rows / brows; ++band) {
        BandMatcher matcher(B);
        uint64_t band_nnz = 0;
        for (uint32_t lr = 0; lr < brows; ++lr) {
            const uint32_t row = band * brows + lr;
            uint32_t i = 0;
            for (uint32_t col = 0; col < mask.cols; ++col) {
                if (!mask.at(row, col)) continue;
                // Deal the row's edges round-robin over its k slots so every
                // slot ends up with the same degree.
                const uint32_t slot = lr * k + (i % k);
                matcher.adj[slot].push_back({col % B, lr, col, true});
                i++;
                band_nnz++;
            }
        }
        const uint64_t group_count = band_nnz / B;
        for (uint64_t g = 0; g < group_count; ++g) {
            std::vector<Coord> coords = matcher.peel();
            std::sort(coords.begin(), coords.end(), [](const Coord& a, const Coord& b) {
                if (a.row != b.row) return a.row < b.row;
                return a.col < b.col;
            });
            std::vector<Coord> group;
            group.reserve(B);
            for (const Coord& c : coords) group.push_back({band * brows + c.row, c.col});
            out.groups.push_back(std::move(group));
        }
    }
    return out;
}

void save_gssf(const GsBsrMatrix& g, const std::string& path) {
    g.check();
    if (g.banks() > 0xffff || g.elems_per_row() > 0xffff)
        throw Error("save_gssf: B/k exceed 16-bit field");

    uint8_t family = 0;
    switch (g.pattern.family) {
        case PatternFamily::GsHybrid: family = 0; break;
        case PatternFamily::GsScatter: family = 1; break;
        case PatternFamily::Block: family = 2; break;
        default: throw Error("save_gssf: unsupported family");
    }
    uint8_t kind = 0;
    if (g.conv) kind = (g.conv->layout == ConvGeometry::Layout::OLI) ? 1 : 2;

    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u16(out, kVersion);
    out.push_back(family);
    append_u16(out, static_cast<uint16_t>(g.banks()));
    append_u16(out, static_cast<uint16_t>(g.elems_per_row()));
    out.push_back(kind);
    append_u32(out, g.rows);
    append_u32(out, g.cols);
    if (g.conv) {
        append_u32(out, g.conv->out_channels);
        append_u32(out, g.conv->kernel_h);
        append_u32(out, g.conv->kernel_w);
        append_u32(out, g.conv->in_channels);
        append_u32(out, g.conv->act_width);
        append_u32(out, g.conv->act_channels);
    }
    append_u32(out, static_cast<uint32_t>(g.group_count()));
    for (uint32_t v : g.indptr) append_u32(out, v);
    for (uint32_t v : g.indices) append_u32(out, v);
    for (float v : g.values) append_f32(out, v);
    if (g.row_perm)
        for (uint32_t v : *g.row_perm) append_u32(out, v);
    atomic_write_file(path, out);
}

GsBsrMatrix load_gssf(const std::string& path) {
    const std::vector<uint8_t> bytes = read_file_bytes(path);
    ByteReader r{bytes};

    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("bad magic in " + path + " (expected \"GSSF\")");
    r.pos = 4;
    const uint16_t version = r.u16("version");
    if (version != kVersion)
        throw FormatError("unsupported GSSF version " + std::to_string(version));
    const uint8_t family = r.u8("family");
    if (family > 2) throw FormatError("unknown family code " + std::to_string(family));
    const uint16_t B = r.u16("banks");
    const uint16_t k = r.u16("elems_per_row");
    const uint8_t kind = r.u8("tensor-kind");
    if (kind > 2) throw FormatError("unknown tensor-kind code " + std::to_string(kind));

    GsBsrMatrix g;
    switch (family) {
        case 0: g.pattern.family = PatternFamily::GsHybrid; break;
        case 1: g.pattern.family = PatternFamily::GsScatter; break;
        case 2: g.pattern.family = PatternFamily::Block; break;
    }
    g.pattern.banks = B;
    g.pattern.elems_per_row = k;
    g.pattern.check();
    g.rows = r.u32("rows");
    g.cols = r.u32("cols");
    if (g.rows == 0 || g.cols == 0) throw FormatError("zero matrix dimension");
    if (kind != 0) {
        ConvGeometry conv;
        conv.layout = (kind == 1) ? ConvGeometry::Layout::OLI : ConvGeometry::Layout::OhwI;
        conv.out_channels = r.u32("conv geometry");
        conv.kernel_h = r.u32("conv geometry");
        conv.kernel_w = r.u32("conv geometry");
        conv.in_channels = r.u32("conv geometry");
        conv.act_width = r.u32("conv geometry");
        conv.act_channels = r.u32("conv geometry");
        g.conv = conv;
    }
    const uint32_t groups = r.u32("group_count");
    const uint32_t brows = g.band_rows();
    if (brows == 0 || g.rows % brows != 0)
        throw FormatError("rows not divisible by band size");
    const uint32_t bands = g.rows / brows;
    g.indptr.resize(size_t(bands) + 1);
    for (auto& v : g.indptr) v = r.u32("indptr");
    g.indices.resize(size_t(groups) * B);
    for (auto& v : g.indices) v = r.u32("indices");
    g.values.resize(size_t(groups) * B);
    for (auto& v : g.values) v = r.f32("values");
    if (family == 1) {
        std::vector<uint32_t> perm(g.rows);
        for (auto& v : perm) v = r.u32("row_perm");
        g.row_perm = std::move(perm);
    }
    if (r.pos != bytes.size()) throw FormatError("trailing bytes after payload in " + path);
    if (g.indptr.back() != groups)
        throw FormatError("indptr[last] " + std::to_string(g.indptr.back()) +
                          " != group_count " + std::to_string(groups));
    g.check();
    return g;
}

} // namespace gs
