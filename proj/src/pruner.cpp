#include "gs/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gs {

namespace {

struct BucketEntry {
    float abs = 0.0f;
    uint32_t col = 0;
};

// Global tie-break rule: larger |w| first, then lower column, then lower row.
bool entry_before(const BucketEntry& a, const BucketEntry& b) {
    if (a.abs != b.abs) return a.abs > b.abs;
    return a.col < b.col;
}

void require_2d(const DenseTensor& w) {
    w.check();
    if (w.rank() != 2) throw Error("pruner: weight tensor must be rank 2");
}

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

} // namespace

ThresholdSpec ThresholdSpec::per_matrix(double sparsity) {
    ThresholdSpec th;
    th.mode = Mode::PerMatrix;
    th.sparsity = sparsity;
    return th;
}

ThresholdSpec ThresholdSpec::external(float threshold) {
    ThresholdSpec th;
    th.mode = Mode::External;
    th.external_threshold = threshold;
    return th;
}

void ThresholdSpec::check() const {
    if (mode == Mode::PerMatrix) {
        if (!(sparsity >= 0.0 && sparsity <= 1.0))
            throw Error("threshold: sparsity must be in [0,1]");
    } else {
        if (!external_threshold) throw Error("threshold: external mode requires a value");
        if (!(*external_threshold >= 0.0f))
            throw Error("threshold: external threshold must be non-negative");
    }
}

float irregular_threshold(const DenseTensor& w2d, double sparsity) {
    require_2d(w2d);
    if (!(sparsity >= 0.0 && sparsity <= 1.0))
        throw Error("irregular_threshold: sparsity must be in [0,1]");
    if (w2d.data.empty()) throw Error("irregular_threshold: empty matrix");

    std::vector<float> mags(w2d.data.size());
    for (size_t i = 0; i < mags.size(); ++i) mags[i] = std::fabs(w2d.data[i]);
    std::sort(mags.begin(), mags.end());
    const int64_t idx = static_cast<int64_t>(std::floor(sparsity * double(mags.size()))) - 1;
    if (idx < 0) return -std::numeric_limits<float>::infinity();
    return mags[std::min<int64_t>(idx, int64_t(mags.size()) - 1)];
}

float resolve_threshold(const DenseTensor& w2d, const ThresholdSpec& th) {
    th.check();
    if (th.mode == ThresholdSpec::Mode::External) return *th.external_threshold;
    return irregular_threshold(w2d, th.sparsity);
}

GroupedMask prune_gs_horizontal(const DenseTensor& w2d, uint32_t banks, const ThresholdSpec& th) {
    require_2d(w2d);
    if (banks == 0) throw Error("prune_gs_horizontal: banks must be >= 1");
    const uint32_t m = w2d.shape[0], n = w2d.shape[1];
    if (n < banks) throw Error("prune_gs_horizontal: cols < banks");
    const float threshold = resolve_threshold(w2d, th);

    GroupedMask out;
    out.mask = MaskMatrix::zeros(m, n);
    out.band_rows = 1;

    std::vector<std::vector<BucketEntry>> buckets(banks);
    for (uint32_t row = 0; row < m; ++row) {
        for (auto& b : buckets) b.clear();
        const float* wrow = w2d.data.data() + size_t(row) * n;
        uint64_t num_items = 0;
        for (uint32_t col = 0; col < n; ++col) {
            const float a = std::fabs(wrow[col]);
            buckets[col % banks].push_back({a, col});
            if (a > threshold) num_items++;
        }
        for (auto& b : buckets) std::sort(b.begin(), b.end(), entry_before);

        const uint64_t group_count = ceil_div(num_items, banks);
        for (uint32_t b = 0; b < banks; ++b) {
            if (group_count > buckets[b].size())
                throw Error("prune_gs_horizontal: row " + std::to_string(row) + " residue " +
                            std::to_string(b) + " has only " + std::to_string(buckets[b].size()) +
                            " columns for " + std::to_string(group_count) + " groups");
        }
        for (uint64_t g = 0; g < group_count; ++g) {
            std::vector<Coord> group;
            group.reserve(banks);
            for (uint32_t b = 0; b < banks; ++b) {
                const uint32_t col = buckets[b][g].col;
                out.mask.set(row, col, 1);
                group.push_back({row, col});
            }
            std::sort(group.begin(), group.end(),
                      [](const Coord& a, const Coord& b) { return a.col < b.col; });
            out.groups.push_back(std::move(group));
        }
    }
    return out;
}

namespace {

// One band's worth of greedy state for the vertical/hybrid selection.
struct BandGreedy {
    uint32_t banks;
    uint32_t k;
    uint32_t band_rows;
    // buckets[local_row][residue], sorted by entry_before; cursor marks the
    // next unselected entry.
    std::vector<std::vector<std::vector<BucketEntry>>> buckets;
    std::vector<std::vector<size_t>> cursor;

    struct Pick {
        float abs;
        uint32_t local_row;
        uint32_t residue;
        uint32_t col;
    };

    // Current group under construction.
    std::vector<Pick> selected;
    std::vector<uint32_t> group_quota;
    std::vector<int32_t> residue_slot; // residue -> index into selected, or -1

    BandGreedy(uint32_t banks_, uint32_t k_, uint32_t band_rows_)
        : banks(banks_), k(k_), band_rows(band_rows_),
          buckets(band_rows_, std::vector<std::vector<BucketEntry>>(banks_)),
          cursor(band_rows_, std::vector<size_t>(banks_, 0)) {}

    void begin_group() {
        selected.clear();
        group_quota.assign(band_rows, 0);
        residue_slot.assign(banks, -1);
    }

    bool head(uint32_t r, uint32_t b, BucketEntry& out) const {
        if (cursor[r][b] >= buckets[r][b].size()) return false;
        out = buckets[r][b][cursor[r][b]];
        return true;
    }

    void take(uint32_t r, uint32_t b) {
        const BucketEntry e = buckets[r][b][cursor[r][b]];
        cursor[r][b]++;
        group_quota[r]++;
        residue_slot[b] = static_cast<int32_t>(selected.size());
        selected.push_back({e.abs, r, b, e.col});
    }

    // Best admissible bucket head for the current group, or nullopt.
    std::optional<Pick> best_head() const {
        std::optional<Pick> best;
        for (uint32_t r = 0; r < band_rows; ++r) {
            if (group_quota[r] >= k) continue;
            for (uint32_t b = 0; b < banks; ++b) {
                if (residue_slot[b] >= 0) continue;
                BucketEntry e;
                if (!head(r, b, e)) continue;
                if (!best || e.abs > best->abs ||
                    (e.abs == best->abs &&
                     (e.col < best->col || (e.col == best->col && r < best->local_row)))) {
                    best = Pick{e.abs, r, b, e.col};
                }
            }
        }
        return best;
    }

    // Single-swap repair: release the smallest-|w| selected entry whose row
    // can host a missing residue, provided the released residue has a head
    // at some row with spare quota. Commits atomically, so the group grows
    // by one entry. Returns false when no such swap exists.
    bool single_swap() {
        std::vector<size_t> order(selected.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
            if (selected[x].abs != selected[y].abs) return selected[x].abs < selected[y].abs;
            return selected[x].col < selected[y].col;
        });
        for (size_t oi : order) {
            const Pick e = selected[oi];
            const uint32_t r = e.local_row;

            // Best missing residue this row can host.
            std::optional<Pick> host;
            for (uint32_t b = 0; b < banks; ++b) {
                if (residue_slot[b] >= 0 || b == e.residue) continue;
                BucketEntry cand;
                if (!head(r, b, cand)) continue;
                if (!host || cand.abs > host->abs || (cand.abs == host->abs && cand.col < host->col))
                    host = Pick{cand.abs, r, b, cand.col};
            }
            if (!host) continue;

            // Best relocation target for the released residue.
            std::optional<Pick> repl;
            for (uint32_t r2 = 0; r2 < band_rows; ++r2) {
                if (r2 == r || group_quota[r2] >= k) continue;
                BucketEntry cand;
                if (!head(r2, e.residue, cand)) continue;
                if (!repl || cand.abs > repl->abs ||
                    (cand.abs == repl->abs &&
                     (cand.col < repl->col || (cand.col == repl->col && r2 < repl->local_row))))
                    repl = Pick{cand.abs, r2, e.residue, cand.col};
            }
            if (!repl) continue;

            cursor[r][e.residue]--; // e was this bucket's most recent take
            group_quota[r]--;
            remove_selected(oi);
            take(host->local_row, host->residue);
            take(repl->local_row, repl->residue);
            return true;
        }
        return false;
    }

    // Kuhn-style augmenting placement: put residue `b` on some row, possibly
    // relocating already-selected residues to other rows. Succeeds iff the
    // group has any completion covering `b` with the remaining bucket heads.
    bool place(uint32_t b, std::vector<uint8_t>& visited_row) {
        for (uint32_t r = 0; r < band_rows; ++r) {
            if (visited_row[r]) continue;
            BucketEntry e;
            if (!head(r, b, e)) continue;
            visited_row[r] = 1;
            if (group_quota[r] < k) {
                take(r, b);
                return true;
            }
            // Row is full: try relocating one of its selected residues,
            // cheapest first. Residues identify selected entries uniquely.
            std::vector<uint32_t> mine;
            for (const Pick& p : selected)
                if (p.local_row == r) mine.push_back(p.residue);
            std::sort(mine.begin(), mine.end(), [&](uint32_t x, uint32_t y) {
                const Pick& px = selected[residue_slot[x]];
                const Pick& py = selected[residue_slot[y]];
                if (px.abs != py.abs) return px.abs < py.abs;
                return px.col < py.col;
            });
            for (uint32_t bres : mine) {
                const Pick moved = selected[residue_slot[bres]];
                // Release: the entry was this bucket's most recent take.
                cursor[r][bres]--;
                group_quota[r]--;
                remove_selected(static_cast<size_t>(residue_slot[bres]));
                if (place(bres, visited_row)) {
                    take(r, b); // row r has a slot again
                    return true;
                }
                // Undo the release.
                cursor[r][bres]++;
                group_quota[r]++;
                residue_slot[bres] = static_cast<int32_t>(selected.size());
                selected.push_back(moved);
            }
        }
        return false;
    }

    void remove_selected(size_t idx) {
        residue_slot[selected[idx].residue] = -1;
        selected.erase(selected.begin() + idx);
        for (uint32_t b = 0; b < banks; ++b)
            if (residue_slot[b] > static_cast<int32_t>(idx)) residue_slot[b]--;
    }
};

} // namespace

namespace {

GroupedMask prune_gs_band_impl(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                               float threshold) {
    if (banks == 0 || elems_per_row == 0) throw Error("prune_gs_band: B and k must be >= 1");
    if (banks % elems_per_row != 0) throw Error("prune_gs_band: k must divide B");
    const uint32_t m = w2d.shape[0], n = w2d.shape[1];
    const uint32_t band_rows = banks / elems_per_row;
    if (m % band_rows != 0)
        throw Error("prune_gs_band: rows " + std::to_string(m) + " not divisible by band size " +
                    std::to_string(band_rows));
    const uint32_t k = elems_per_row;

    GroupedMask out;
    out.mask = MaskMatrix::zeros(m, n);
    out.band_rows = band_rows;

    for (uint32_t band = 0; band < m / band_rows; ++band) {
        BandGreedy state(banks, k, band_rows);
        uint64_t num_items = 0;
        for (uint32_t lr = 0; lr < band_rows; ++lr) {
            const uint32_t row = band * band_rows + lr;
            const float* wrow = w2d.data.data() + size_t(row) * n;
            for (uint32_t col = 0; col < n; ++col) {
                const float a = std::fabs(wrow[col]);
                state.buckets[lr][col % banks].push_back({a, col});
                if (a > threshold) num_items++;
            }
            for (auto& b : state.buckets[lr]) std::sort(b.begin(), b.end(), entry_before);
        }

        const uint64_t group_count = ceil_div(num_items, banks);
        for (uint64_t g = 0; g < group_count; ++g) {
            state.begin_group();
            while (state.selected.size() < banks) {
                const auto pick = state.best_head();
                if (pick) {
                    state.take(pick->local_row, pick->residue);
                    continue;
                }
                // No admissible head: try a single swap first, then a full
                // augmenting re-route of already-selected residues.
                if (state.single_swap()) continue;
                uint32_t missing = banks;
                for (uint32_t b = 0; b < banks; ++b)
                    if (state.residue_slot[b] < 0) {
                        missing = b;
                        break;
                    }
                std::vector<uint8_t> visited(band_rows, 0);
                if (missing == banks || !state.place(missing, visited))
                    throw Error("prune_gs_band: band " + std::to_string(band) +
                                " cannot cover residue " + std::to_string(missing) +
                                " (no columns left in that bank)");
            }

            std::sort(state.selected.begin(), state.selected.end(),
                      [](const auto& a, const auto& b) {
                          if (a.local_row != b.local_row) return a.local_row < b.local_row;
                          return a.col < b.col;
                      });
            std::vector<Coord> group;
            group.reserve(banks);
            for (const auto& p : state.selected) {
                const uint32_t row = band * band_rows + p.local_row;
                out.mask.set(row, p.col, 1);
                group.push_back({row, p.col});
            }
            out.groups.push_back(std::move(group));
        }
    }
    return out;
}

} // namespace

GroupedMask prune_gs_band(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                          const ThresholdSpec& th) {
    require_2d(w2d);
    return prune_gs_band_impl(w2d, banks, elems_per_row, resolve_threshold(w2d, th));
}

GroupedMask prune_gs_scatter(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                             const ThresholdSpec& th) {
    require_2d(w2d);
    const uint32_t m = w2d.shape[0], n = w2d.shape[1];
    const float threshold = resolve_threshold(w2d, th);

    // Sort rows by descending above-threshold count, ties by index.
    std::vector<uint64_t> counts(m, 0);
    for (uint32_t r = 0; r < m; ++r)
        for (uint32_t c = 0; c < n; ++c)
            if (std::fabs(w2d.data[size_t(r) * n + c]) > threshold) counts[r]++;
    std::vector<uint32_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](uint32_t a, uint32_t b) { return counts[a] > counts[b]; });

    DenseTensor permuted;
    permuted.dtype = w2d.dtype;
    permuted.shape = w2d.shape;
    permuted.data.resize(w2d.data.size());
    for (uint32_t i = 0; i < m; ++i)
        std::copy_n(w2d.data.begin() + size_t(perm[i]) * n, n,
                    permuted.data.begin() + size_t(i) * n);

    GroupedMask banded = prune_gs_band_impl(permuted, banks, elems_per_row, threshold);

    GroupedMask out;
    out.band_rows = banded.band_rows;
    out.row_perm = perm;
    out.mask = MaskMatrix::zeros(m, n);
    for (uint32_t i = 0; i < m; ++i)
        for (uint32_t c = 0; c < n; ++c)
            out.mask.set(perm[i], c, banded.mask.at(i, c));
    out.groups.reserve(banded.groups.size());
    for (const auto& g : banded.groups) {
        std::vector<Coord> group;
        group.reserve(g.size());
        for (const Coord& coord : g) group.push_back({perm[coord.row], coord.col});
        out.groups.push_back(std::move(group));
    }
    return out;
}

MaskMatrix prune_block(const DenseTensor& w2d, uint32_t banks, uint32_t elems_per_row,
                       const ThresholdSpec& th) {
    require_2d(w2d);
    if (banks == 0 || elems_per_row == 0) throw Error("prune_block: B and k must be >= 1");
    if (banks % elems_per_row != 0) throw Error("prune_block: k must divide B");
    const uint32_t m = w2d.shape[0], n = w2d.shape[1];
    const uint32_t block_h = banks / elems_per_row;
    const uint32_t block_w = elems_per_row;
    if (m % block_h != 0)
        throw Error("prune_block: rows not divisible by block height " + std::to_string(block_h));
    if (n % block_w != 0)
        throw Error("prune_block: cols not divisible by block width " + std::to_string(block_w));
    const float threshold = resolve_threshold(w2d, th);

    MaskMatrix mask = MaskMatrix::zeros(m, n);
    const uint32_t blocks_per_row = n / block_w;
    for (uint32_t br = 0; br < m / block_h; ++br) {
        uint64_t num_items = 0;
        std::vector<std::pair<double, uint32_t>> scores; // (-score, index) for sorting
        scores.reserve(blocks_per_row);
        for (uint32_t bc = 0; bc < blocks_per_row; ++bc) {
            double score = 0.0;
            for (uint32_t i = 0; i < block_h; ++i) {
                const uint32_t row = br * block_h + i;
                for (uint32_t j = 0; j < block_w; ++j) {
                    const float a = std::fabs(w2d.data[size_t(row) * n + bc * block_w + j]);
                    score += a;
                    if (a > threshold) num_items++;
                }
            }
            scores.emplace_back(score, bc);
        }
        const uint64_t keep = ceil_div(num_items, banks);
        std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
            return a.first > b.first; // ties keep lower block index (stable)
        });
        for (uint64_t i = 0; i < keep && i < scores.size(); ++i) {
            const uint32_t bc = scores[i].second;
            for (uint32_t r = 0; r < block_h; ++r)
                for (uint32_t j = 0; j < block_w; ++j)
                    mask.set(br * block_h + r, bc * block_w + j, 1);
        }
    }
    return mask;
}

double kept_magnitude(const DenseTensor& w2d, const MaskMatrix& mask) {
    require_2d(w2d);
    if (w2d.shape[0] != mask.rows || w2d.shape[1] != mask.cols)
        throw Error("kept_magnitude: weight/mask shape mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < w2d.data.size(); ++i)
        if (mask.bits[i]) sum += std::fabs(w2d.data[i]);
    return sum;
}

} // namespace gs
