#pragma once

// Brute-force oracles kept independent of the library's selection code.

#include <cstdint>
#include <vector>

#include "gs/tensor.hpp"

namespace testutil {

// Maximum total magnitude over all masks that keep, in each residue bucket
// of each row, exactly the same number of elements as the greedy horizontal
// selection (groups_for_row per bucket). Enumerates the full cartesian
// product of per-bucket subsets; no independence assumption.
inline double best_row_balanced_magnitude(const std::vector<std::vector<float>>& bucket_mags,
                                          uint64_t per_bucket) {
    double best = -1.0;
    std::vector<size_t> which(bucket_mags.size(), 0);
    // Enumerate subsets per bucket as bitmasks with popcount == per_bucket.
    std::vector<std::vector<uint32_t>> choices(bucket_mags.size());
    for (size_t b = 0; b < bucket_mags.size(); ++b) {
        const size_t sz = bucket_mags[b].size();
        for (uint32_t bm = 0; bm < (1u << sz); ++bm)
            if (static_cast<uint64_t>(__builtin_popcount(bm)) == per_bucket)
                choices[b].push_back(bm);
        if (choices[b].empty()) return -1.0; // infeasible count
    }
    for (;;) {
        double total = 0.0;
        for (size_t b = 0; b < bucket_mags.size(); ++b) {
            const uint32_t bm = choices[b][which[b]];
            for (size_t i = 0; i < bucket_mags[b].size(); ++i)
                if (bm & (1u << i)) total += bucket_mags[b][i];
        }
        if (total > best) best = total;
        size_t pos = 0;
        while (pos < which.size() && ++which[pos] == choices[pos].size()) {
            which[pos] = 0;
            pos++;
        }
        if (pos == which.size()) break;
    }
    return best;
}

// Brute-force optimum for one matrix under the GS(B,B) pattern with the
// greedy's own per-row group counts (num_items derived from the threshold).
inline double brute_force_horizontal_optimum(const gs::DenseTensor& w, uint32_t banks,
                                             float threshold) {
    const uint32_t m = w.shape[0], n = w.shape[1];
    double total = 0.0;
    for (uint32_t row = 0; row < m; ++row) {
        std::vector<std::vector<float>> buckets(banks);
        uint64_t num_items = 0;
        for (uint32_t col = 0; col < n; ++col) {
            const float a = std::abs(w.data[size_t(row) * n + col]);
            buckets[col % banks].push_back(a);
            if (a > threshold) num_items++;
        }
        const uint64_t groups = (num_items + banks - 1) / banks;
        if (groups == 0) continue;
        total += best_row_balanced_magnitude(buckets, groups);
    }
    return total;
}

// Unconstrained per-row top-K selection (the irregular upper bound at
// matched per-row kept counts).
inline double irregular_topk_magnitude(const gs::DenseTensor& w,
                                       const std::vector<uint64_t>& keep_per_row) {
    const uint32_t m = w.shape[0], n = w.shape[1];
    double total = 0.0;
    for (uint32_t row = 0; row < m; ++row) {
        std::vector<float> mags(n);
        for (uint32_t col = 0; col < n; ++col) mags[col] = std::abs(w.data[size_t(row) * n + col]);
        std::sort(mags.begin(), mags.end(), std::greater<float>());
        for (uint64_t i = 0; i < keep_per_row[row] && i < n; ++i) total += mags[i];
    }
    return total;
}

} // namespace testutil
