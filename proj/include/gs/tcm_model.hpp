#pragma once

#include <cstdint>
#include <vector>

#include "gs/gsformat.hpp"
#include "gs/kernels.hpp"
#include "gs/patterns.hpp"

namespace gs {

// Scratchpad gather/scatter engine parameters: a gather costs
// gather_base_cycles when its addresses hit distinct sub-banks plus
// conflict_penalty_cycles per extra serialized access.
struct TcmConfig {
    uint32_t banks = 4;
    uint32_t gather_base_cycles = 3;
    uint32_t conflict_penalty_cycles = 1;
};

// Per-iteration instruction costs for the kernel loop skeletons. Any TCM
// access (gather or contiguous vector load) costs gather_base_cycles; the
// per-band lane fold costs ceil(log2 k) cycles. These are comparative
// knobs, not hardware truth.
struct CostParams {
    double weight_load_cycles = 1.0;
    double index_load_cycles = 1.0;
    double mac_cycles = 1.0;
    double outer_overhead_cycles = 2.0;
};

// Serialized accesses for one gather: the maximum number of offsets landing
// in the same bank (0 for an empty list).
uint32_t gather_accesses(const std::vector<uint32_t>& offsets, const TcmConfig& cfg);

// Cycle cost of one gather with the given serialized access count.
double gather_cycles(uint32_t accesses, const TcmConfig& cfg);

enum class CsrOrder {
    Ascending,      // gather B consecutive stored indices at a time
    OptimalReorder, // best per-row reordering: max residue multiplicity
};

// Serialized accesses needed to gather one CSR row's activations. cols must
// be strictly increasing.
uint64_t csr_row_accesses(const std::vector<uint32_t>& cols, uint32_t banks, CsrOrder order);

struct AccessRatios {
    double ascending_ratio = 0.0;
    double reorder_ratio = 0.0;
};

// Monte-Carlo surrogate for the irregular-sparsity access overhead: per
// trial, sample an i.i.d. mask and compare CSR gather counts against the
// perfectly balanced count sum(ceil(nnz_row / B)). Sub-seed for trial t is
// seed + t (incremented further if a trial degenerates to an empty mask);
// ratios are averaged over trials.
AccessRatios access_ratio_experiment(uint32_t m, uint32_t n, double sparsity, uint32_t banks,
                                     uint32_t trials, uint64_t seed);

// Same ratios computed on a caller-supplied mask.
AccessRatios mask_access_ratios(const MaskMatrix& mask, uint32_t banks);

struct AccessReport {
    uint64_t total_gathers = 0;
    uint64_t serialized_accesses = 0;
    uint64_t ideal_accesses = 0;
    double ratio = 1.0; // serialized / ideal (1.0 when ideal == 0)
};

// Prices a kernel trace; GS-format traces always report ratio exactly 1.0.
AccessReport trace_cost(const KernelTrace& trace, const TcmConfig& cfg);

struct KernelDescriptor {
    enum class Kind { Gs, Block, Dense };
    Kind kind = Kind::Dense;
    uint32_t m = 0;
    uint32_t n = 0;
    uint32_t banks = 0;         // SIMD width / sub-bank count
    uint32_t elems_per_row = 0; // k (Gs/Block)
    uint64_t groups = 0;        // total gather groups (Gs/Block)
};

KernelDescriptor descriptor_for(const GsBsrMatrix& g);
// Synthetic uniform-sparsity descriptors: nnz per row = round(n*(1-sparsity)),
// groups = bands * ceil(nnz_row / k).
KernelDescriptor synthetic_gs(uint32_t m, uint32_t n, uint32_t banks, uint32_t k, double sparsity);
KernelDescriptor synthetic_block(uint32_t m, uint32_t n, uint32_t banks, uint32_t k,
                                 double sparsity);
KernelDescriptor synthetic_dense(uint32_t m, uint32_t n, uint32_t banks);

struct CycleEstimate {
    double cycles = 0.0;
    double dense_cycles = 0.0;
    double speedup = 0.0; // dense_cycles / cycles
};

// Loop-skeleton cycle model:
//   gs/block: bands*outer + groups*(w_load + idx_load + tcm_access + mac)
//             + bands*ceil(log2 k)
//   dense:    m*outer + m*ceil(n/B)*(w_load + tcm_access + mac)
//             + m*ceil(log2 B)
// GS gathers are conflict-free by construction; block replaces the gather
// with a contiguous TCM vector load at the same access latency.
CycleEstimate estimate_cycles(const KernelDescriptor& desc, const TcmConfig& cfg,
                              const CostParams& params);

} // namespace gs
