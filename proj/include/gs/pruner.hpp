#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gs/patterns.hpp"
#include "gs/tensor.hpp"

namespace gs {

struct Coord {
    uint32_t row = 0; // original row index
    uint32_t col = 0;

    bool operator==(const Coord&) const = default;
};

// A mask plus its partition into conflict-free gather groups. Each group has
// exactly B coordinates with pairwise-distinct column residues mod B and
// exactly k coordinates per band row; groups are stored in (band, fill)
// order, each internally sorted by (band-local row, column) ascending. For
// scatter masks the coordinates carry original row indices and band
// membership is defined by row_perm (row_perm[i] = original row at banded
// position i).
struct GroupedMask {
    MaskMatrix mask; // original row order
    std::vector<std::vector<Coord>> groups;
    uint32_t band_rows = 1; // B/k
    std::optional<std::vector<uint32_t>> row_perm;
};

struct ThresholdSpec {
    enum class Mode { PerMatrix, External };
    Mode mode = Mode::PerMatrix;
    double sparsity = 0.0; // in [0,1], used in PerMatrix mode
    std::optional<float> external_threshold;

    static ThresholdSpec per_matrix(double sparsity);
    static ThresholdSpec external(float threshold);
    void check() const;
};

// Magnitude threshold, Pareto convention: sort |w| ascending, take the value
// at index floor(sparsity*m*n) - 1 (-inf when the index is -1). An element is
// kept iff |w| is strictly greater than the threshold; ties at the threshold
// are dropped.
float irregular_threshold(const DenseTensor& w2d, double sparsity);

// Per-matrix mode computes irregular_threshold, external mode returns the
// caller-supplied value (used for global-across-layers budgets).
float resolve_threshold(const DenseTensor& w2d, const ThresholdSpec& th);

// Horizontal selection: per row, bucket columns by residue, sort buckets by
// |w| descending, and take the top of every bucket ceil(num_items/B) times,
// where num_items counts entries above the threshold. The kept count per row
// is rounded up to a multiple of B.
GroupedMask prune_gs_horizontal(const DenseTensor& w2d, uint32_t banks, const ThresholdSpec& th);

// Band greedy for vertical/hybrid GS(B,k): per band of B/k rows, fill
// ceil(num_items/B) groups one at a time, always taking the maximum-|w|
// bucket head admissible for the current group (unused residue, row quota
// below k). A stalled group attempts a local swap repair before failing.
GroupedMask prune_gs_band(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                          const ThresholdSpec& th);

// Scatter: rows sorted by descending above-threshold count (ties by index),
// then band-pruned in sorted order; row_perm records the sort.
GroupedMask prune_gs_scatter(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                             const ThresholdSpec& th);

// Block baseline: per block-row, keep the ceil(num_items/B) grid blocks with
// the largest L1 score (ties to the lower block index).
MaskMatrix prune_block(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                       const ThresholdSpec& th);

// Sum of |w| over kept positions.
double kept_magnitude(const DenseTensor& w2d, const MaskMatrix& mask);

} // namespace gs
