#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gs/patterns.hpp"
#include "gs/pruner.hpp"
#include "gs/tensor.hpp"

namespace gs {

// Compact bank-balanced representation. values/indices are group-major
// tables, one row of B scalars per group; element j of a group belongs to
// band-local row j/k, and within a row segment columns ascend. indptr holds
// per-band group prefix counts. Without conv geometry the indices are column
// indices; with it they are activation-relative offsets. For scatter
// matrices row_perm[i] gives the original row at banded position i.
struct GsBsrMatrix {
    PatternDescriptor pattern;
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<float> values;
    std::vector<uint32_t> indices;
    std::vector<uint32_t> indptr;
    std::optional<ConvGeometry> conv;
    std::optional<std::vector<uint32_t>> row_perm;

    uint32_t banks() const { return pattern.banks; }
    uint32_t elems_per_row() const { return pattern.elems_per_row; }
    uint32_t band_rows() const { return pattern.band_rows(); }
    uint32_t band_count() const { return band_rows() ? rows / band_rows() : 0; }
    uint64_t group_count() const { return indptr.empty() ? 0 : indptr.back(); }
    uint64_t nnz() const { return group_count() * banks(); }

    // Structural invariants; throws Error/FormatError with the first
    // violation (monotone indptr, table sizes, per-group distinct residues,
    // canonical in-row column order, index ranges, permutation validity).
    void check() const;
};

// Packs masked weights into the compact format. The grouped mask must be
// internally consistent with the mask and descriptor; the first offending
// group is reported otherwise. With conv geometry, flattened column indices
// are replaced by activation offsets (and must stay conflict-free).
GsBsrMatrix encode(const DenseTensor& w2d, const GroupedMask& gm, const PatternDescriptor& p,
                   const std::optional<ConvGeometry>& conv = std::nullopt);

// Masked dense weights in original row order.
DenseTensor decode(const GsBsrMatrix& g);

// Builds a grouping for a bare valid GS mask. Horizontal: round-robin zip of
// column-sorted residue buckets. Vertical/hybrid: peel perfect matchings
// from the band's row-slot/residue bipartite multigraph.
GroupedMask group_mask(const MaskMatrix& mask, const PatternDescriptor& p);

// GSSF file format (little-endian, see README). Bit-exact round-trip.
void save_gssf(const GsBsrMatrix& g, const std::string& path);
GsBsrMatrix load_gssf(const std::string& path);

} // namespace gs
