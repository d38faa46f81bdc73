#include "gs/tcm_model.hpp"

#include <algorithm>
#include <cmath>

#include "gs/rng.hpp"

namespace gs {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

uint32_t log2_ceil(uint32_t v) {
    uint32_t bits = 0;
    while ((1u << bits) < v) bits++;
    return bits;
}

} // namespace

uint32_t gather_accesses(const std::vector<uint32_t>& offsets, const TcmConfig& cfg) {
    if (cfg.banks == 0) throw Error("gather_accesses: banks must be >= 1");
    if (offsets.empty()) return 0;
    std::vector<uint32_t> counts(cfg.banks, 0);
    uint32_t worst = 0;
    for (uint32_t off : offsets) worst = std::max(worst, ++counts[off % cfg.banks]);
    return worst;
}

double gather_cycles(uint32_t accesses, const TcmConfig& cfg) {
    if (accesses == 0) return 0.0;
    return double(cfg.gather_base_cycles) + double(accesses - 1) * cfg.conflict_penalty_cycles;
}

uint64_t csr_row_accesses(const std::vector<uint32_t>& cols, uint32_t banks, CsrOrder order) {
    if (banks == 0) throw Error("csr_row_accesses: banks must be >= 1");
    for (size_t i = 1; i < cols.size(); ++i)
        if (cols[i] <= cols[i - 1]) throw Error("csr_row_accesses: columns not strictly increasing");
    if (cols.empty()) return 0;

    if (order == CsrOrder::Ascending) {
        uint64_t total = 0;
        std::vector<uint32_t> counts(banks);
        for (size_t start = 0; start < cols.size(); start += banks) {
            std::fill(counts.begin(), counts.end(), 0);
            uint32_t worst = 0;
            const size_t end = std::min(cols.size(), start + banks);
            for (size_t i = start; i < end; ++i)
                worst = std::max(worst, ++counts[cols[i] % banks]);
            total += worst;
        }
        return total;
    }
    // Optimal reordering: each conflict-free gather can hold at most one
    // element per residue, so the row needs exactly max residue multiplicity.
    std::vector<uint64_t> counts(banks, 0);
    uint64_t worst = 0;
    for (uint32_t c : cols) worst = std::max(worst, ++counts[c % banks]);
    return worst;
}

namespace {

struct MaskTotals {
    uint64_t ascending = 0;
    uint64_t reorder = 0;
    uint64_t balanced = 0;
};

MaskTotals csr_totals(const MaskMatrix& mask, uint32_t banks) {
    MaskTotals t;
    std::vector<uint32_t> cols;
    for (uint32_t r = 0; r < mask.rows; ++r) {
        cols.clear();
        for (uint32_t c = 0; c < mask.cols; ++c)
            if (mask.at(r, c)) cols.push_back(c);
        if (cols.empty()) continue;
        t.ascending += csr_row_accesses(cols, banks, CsrOrder::Ascending);
        t.reorder += csr_row_accesses(cols, banks, CsrOrder::OptimalReorder);
        t.balanced += ceil_div(cols.size(), banks);
    }
    return t;
}

} // namespace

AccessRatios access_ratio_experiment(uint32_t m, uint32_t n, double sparsity, uint32_t banks,
                                     uint32_t trials, uint64_t seed) {
    if (m == 0 || n == 0 || banks == 0 || trials == 0)
        throw Error("access_ratio_experiment: parameters must be positive");
    if (!(sparsity > 0.0 && sparsity < 1.0))
        throw Error("access_ratio_experiment: sparsity must be in (0,1)");

    double asc_sum = 0.0, reorder_sum = 0.0;
    for (uint32_t trial = 0; trial < trials; ++trial) {
        uint64_t sub_seed = seed + trial;
        MaskTotals totals;
        for (;;) {
            Xoshiro256pp rng(sub_seed);
            MaskMatrix mask = MaskMatrix::zeros(m, n);
            for (auto& bit : mask.bits) bit = (rng.next_double() >= sparsity) ? 1 : 0;
            totals = csr_totals(mask, banks);
            if (totals.balanced > 0) break;
            sub_seed += 1; // degenerate all-zero draw, resample
        }
        asc_sum += double(totals.ascending) / double(totals.balanced);
        reorder_sum += double(totals.reorder) / double(totals.balanced);
    }
    return {asc_sum / trials, reorder_sum / trials};
}

AccessRatios mask_access_ratios(const MaskMatrix& mask, uint32_t banks) {
    const MaskTotals totals = csr_totals(mask, banks);
    if (totals.balanced == 0) throw Error("mask_access_ratios: mask has no non-zeros");
    return {double(totals.ascending) / double(totals.balanced),
            double(totals.reorder) / double(totals.balanced)};
}

AccessReport trace_cost(const KernelTrace& trace, const TcmConfig& cfg) {
    if (trace.banks == 0 && !trace.offsets.empty())
        throw Error("trace_cost: trace lane count not set");
    if (trace.banks != 0 && trace.offsets.size() % trace.banks != 0)
        throw Error("trace_cost: offset count not a multiple of the lane count");

    AccessReport rep;
    rep.total_gathers = trace.gather_count();
    rep.ideal_accesses = rep.total_gathers;
    std::vector<uint32_t> gather(trace.banks);
    for (uint64_t gi = 0; gi < rep.total_gathers; ++gi) {
        std::copy_n(trace.offsets.begin() + size_t(gi) * trace.banks, trace.banks, gather.begin());
        rep.serialized_accesses += gather_accesses(gather, cfg);
    }
    rep.ratio = rep.ideal_accesses == 0
                    ? 1.0
                    : double(rep.serialized_accesses) / double(rep.ideal_accesses);
    return rep;
}

KernelDescriptor descriptor_for(const GsBsrMatrix& g) {
    KernelDescriptor d;
    d.kind = (g.pattern.family == PatternFamily::Block) ? KernelDescriptor::Kind::Block
                                                        : KernelDescriptor::Kind::Gs;
    d.m = g.rows;
    d.n = g.cols;
    d.banks = g.banks();
    d.elems_per_row = g.elems_per_row();
    d.groups = g.group_count();
    return d;
}

namespace {

KernelDescriptor synthetic_grouped(KernelDescriptor::Kind kind, uint32_t m, uint32_t n,
                                   uint32_t banks, uint32_t k, double sparsity) {
    if (banks == 0 || k == 0 || banks % k != 0)
        throw Error("synthetic descriptor: k must divide B");
    const uint32_t band_rows = banks / k;
    if (m % band_rows != 0) throw Error("synthetic descriptor: rows not divisible by band size");
    if (!(sparsity >= 0.0 && sparsity <= 1.0))
        throw Error("synthetic descriptor: sparsity must be in [0,1]");
    const uint64_t nnz_row = static_cast<uint64_t>(std::llround(double(n) * (1.0 - sparsity)));
    KernelDescriptor d;
    d.kind = kind;
    d.m = m;
    d.n = n;
    d.banks = banks;
    d.elems_per_row = k;
    d.groups = uint64_t(m / band_rows) * ceil_div(nnz_row, k);
    return d;
}

} // namespace

KernelDescriptor synthetic_gs(uint32_t m, uint32_t n, uint32_t banks, uint32_t k,
                              double sparsity) {
    return synthetic_grouped(KernelDescriptor::Kind::Gs, m, n, banks, k, sparsity);
}

KernelDescriptor synthetic_block(uint32_t m, uint32_t n, uint32_t banks, uint32_t k,
                                 double sparsity) {
    return synthetic_grouped(KernelDescriptor::Kind::Block, m, n, banks, k, sparsity);
}

KernelDescriptor synthetic_dense(uint32_t m, uint32_t n, uint32_t banks) {
    KernelDescriptor d;
    d.kind = KernelDescriptor::Kind::Dense;
    d.m = m;
    d.n = n;
    d.banks = banks;
    return d;
}

CycleEstimate estimate_cycles(const KernelDescriptor& desc, const TcmConfig& cfg,
                              const CostParams& params) {
    if (desc.m == 0 || desc.n == 0 || desc.banks == 0)
        throw Error("estimate_cycles: descriptor extents must be positive");
    const double access = cfg.gather_base_cycles;

    const double dense_cycles =
        double(desc.m) * params.outer_overhead_cycles +
        double(desc.m) * double(ceil_div(desc.n, desc.banks)) *
            (params.weight_load_cycles + access + params.mac_cycles) +
        double(desc.m) * log2_ceil(desc.banks);

    CycleEstimate est;
    est.dense_cycles = dense_cycles;
    if (desc.kind == KernelDescriptor::Kind::Dense) {
        est.cycles = dense_cycles;
        est.speedup = 1.0;
        return est;
    }

    if (desc.elems_per_row == 0 || desc.banks % desc.elems_per_row != 0)
        throw Error("estimate_cycles: k must divide B");
    const uint32_t band_rows = desc.banks / desc.elems_per_row;
    if (desc.m % band_rows != 0)
        throw Error("estimate_cycles: rows not divisible by band size");
    const double bands = double(desc.m) / band_rows;
    const double inner = params.weight_load_cycles + params.index_load_cycles + access +
                         params.mac_cycles;
    est.cycles = bands * params.outer_overhead_cycles + double(desc.groups) * inner +
                 bands * log2_ceil(desc.elems_per_row);
    est.speedup = est.cycles > 0 ? dense_cycles / est.cycles : 0.0;
    return est;
}

} // namespace gs
