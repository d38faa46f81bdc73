#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gs/gsformat.hpp"
#include "gs/tensor.hpp"

namespace gs {

// One entry per inner-loop gather: the banks addresses actually gathered
// (window-origin plus stored offset for convolutions).
struct KernelTrace {
    uint32_t banks = 0;
    std::vector<uint32_t> offsets; // gather-major, banks per gather

    uint64_t gather_count() const { return banks == 0 ? 0 : offsets.size() / banks; }
};

// Trace file: group_count u32, then per group banks x u32 offsets.
void save_trace(const KernelTrace& t, const std::string& path);
// banks == 0 infers the lane count from the file size.
KernelTrace load_trace(const std::string& path, uint32_t banks = 0);

// spMV for GS(B,B): per row, gather/multiply into a B-wide accumulator per
// group, then reduce lanes with a fixed pairwise tree. Products are f32;
// accumulation is double so outputs track the oracles to rounding error.
DenseTensor spmv_horizontal(const GsBsrMatrix& g, const DenseTensor& act,
                            KernelTrace* trace = nullptr);

// spMV for GS(B,k), k < B: the accumulator carries B/k row partial sums;
// each row's k lanes are folded pairwise at band end (no fold when k == 1).
// Scatter results are written back through the row permutation.
DenseTensor spmv_vertical_hybrid(const GsBsrMatrix& g, const DenseTensor& act,
                                 KernelTrace* trace = nullptr);

// Dispatches on k.
DenseTensor spmv(const GsBsrMatrix& g, const DenseTensor& act, KernelTrace* trace = nullptr);

// Sparse convolution with baked activation offsets. act is H x W x C for
// 2-D (OhwI) geometry or L x C for 1-D (OLI); zero padding is materialized
// before the kernel so offset arithmetic matches the unpadded case. The
// padded activation width must equal the encoded act_width. Output is
// O x H_out x W_out (2-D) or O x L_out (1-D).
DenseTensor sparse_conv(const GsBsrMatrix& g, const DenseTensor& act, uint32_t stride_h,
                        uint32_t stride_w, uint32_t pad_h, uint32_t pad_w,
                        KernelTrace* trace = nullptr);

// Reference oracles: plain nested loops, f32 products accumulated in
// double, ascending index order, no blocking.
std::vector<float> dense_matvec(const DenseTensor& w2d, const std::vector<float>& act);
DenseTensor dense_matvec(const DenseTensor& w2d, const DenseTensor& act);

// w4d is O x h x w x I; act as in sparse_conv; padding handled by implicit
// zeros (no materialization).
DenseTensor dense_conv(const DenseTensor& w4d, const DenseTensor& act, uint32_t stride_h,
                       uint32_t stride_w, uint32_t pad_h, uint32_t pad_w);

} // namespace gs
