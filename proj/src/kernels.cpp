#include "gs/kernels.hpp"

#include <algorithm>

#include "io_util.hpp"

namespace gs {

namespace {

// Fixed pairwise tree over len lanes; deterministic for any len.
double tree_reduce(double* lanes, uint32_t len) {
    uint32_t n = len;
    while (n > 1) {
        const uint32_t pairs = n / 2;
        for (uint32_t i = 0; i < pairs; ++i) lanes[i] = lanes[2 * i] + lanes[2 * i + 1];
        if (n & 1) {
            lanes[pairs] = lanes[n - 1];
            n = pairs + 1;
        } else {
            n = pairs;
        }
    }
    return lanes[0];
}

void trace_gather(KernelTrace* trace, const uint32_t* addrs, uint32_t banks) {
    if (!trace) return;
    trace->banks = banks;
    trace->offsets.insert(trace->offsets.end(), addrs, addrs + banks);
}

} // namespace

void save_trace(const KernelTrace& t, const std::string& path) {
    if (t.banks == 0 && !t.offsets.empty()) throw Error("save_trace: banks not set");
    std::vector<uint8_t> out;
    append_u32(out, static_cast<uint32_t>(t.gather_count()));
    for (uint32_t v : t.offsets) append_u32(out, v);
    atomic_write_file(path, out);
}

KernelTrace load_trace(const std::string& path, uint32_t banks) {
    const std::vector<uint8_t> bytes = read_file_bytes(path);
    ByteReader r{bytes};
    const uint32_t gathers = r.u32("group_count");
    KernelTrace t;
    if (gathers == 0) {
        if (r.pos != bytes.size()) throw FormatError("trailing bytes in empty trace");
        t.banks = banks;
        return t;
    }
    const size_t payload_words = (bytes.size() - 4) / 4;
    if ((bytes.size() - 4) % 4 != 0 || payload_words % gathers != 0)
        throw FormatError("trace payload size inconsistent with group_count");
    const uint32_t inferred = static_cast<uint32_t>(payload_words / gathers);
    if (banks == 0) banks = inferred;
    if (banks != inferred)
        throw FormatError("trace holds " + std::to_string(inferred) + " offsets per gather, expected " +
                          std::to_string(banks));
    t.banks = banks;
    t.offsets.resize(payload_words);
    for (auto& v : t.offsets) v = r.u32("offsets");
    return t;
}

namespace {

// Shared band loop for spMV: act addressed directly by stored indices.
DenseTensor spmv_impl(const GsBsrMatrix& g, const DenseTensor& act, KernelTrace* trace) {
    g.check();
    if (g.conv)
        throw Error("spmv: matrix was conv-encoded; run the convolution kernel instead");
    act.check();
    if (act.rank() != 1) throw Error("spmv: activation must be rank 1");
    if (act.shape[0] != g.cols)
        throw Error("spmv: activation length " + std::to_string(act.shape[0]) +
                    " != matrix cols " + std::to_string(g.cols));

    const uint32_t B = g.banks(), k = g.elems_per_row(), brows = g.band_rows();
    if (trace) trace->banks = B;
    std::vector<float> result(g.rows, 0.0f);
    std::vector<double> acc(B), lanes(std::max<uint32_t>(k, 1));
    for (uint32_t band = 0; band < g.band_count(); ++band) {
        std::fill(acc.begin(), acc.end(), 0.0f);
        for (uint32_t gi = g.indptr[band]; gi < g.indptr[band + 1]; ++gi) {
            const uint32_t* idx = g.indices.data() + size_t(gi) * B;
            const float* val = g.values.data() + size_t(gi) * B;
            for (uint32_t j = 0; j < B; ++j) {
                if (idx[j] >= g.cols)
                    throw Error("spmv: gather offset " + std::to_string(idx[j]) + " out of range");
                acc[j] += double(act.data[idx[j]] * val[j]);
            }
            trace_gather(trace, idx, B);
        }
        for (uint32_t lr = 0; lr < brows; ++lr) {
            std::copy_n(acc.begin() + size_t(lr) * k, k, lanes.begin());
            const uint32_t banded = band * brows + lr;
            const uint32_t row = g.row_perm ? (*g.row_perm)[banded] : banded;
            result[row] = static_cast<float>(tree_reduce(lanes.data(), k));
        }
    }
    return make_tensor({g.rows}, std::move(result));
}

} // namespace

DenseTensor spmv_horizontal(const GsBsrMatrix& g, const DenseTensor& act, KernelTrace* trace) {
    if (g.elems_per_row() != g.banks())
        throw Error("spmv_horizontal: pattern is GS(B,k) with k != B");
    return spmv_impl(g, act, trace);
}

DenseTensor spmv_vertical_hybrid(const GsBsrMatrix& g, const DenseTensor& act,
                                 KernelTrace* trace) {
    if (g.elems_per_row() >= g.banks())
        throw Error("spmv_vertical_hybrid: k == B; use spmv_horizontal");
    return spmv_impl(g, act, trace);
}

DenseTensor spmv(const GsBsrMatrix& g, const DenseTensor& act, KernelTrace* trace) {
    return g.elems_per_row() == g.banks() ? spmv_horizontal(g, act, trace)
                                          : spmv_vertical_hybrid(g, act, trace);
}

namespace {

// Returns act as an H x W x C buffer, zero-padded as requested.
DenseTensor pad_activation(const DenseTensor& act, bool one_dim, uint32_t pad_h, uint32_t pad_w) {
    act.check();
    uint32_t H, W, C;
    if (one_dim) {
        if (act.rank() != 2) throw Error("sparse_conv: 1-D activation must be rank 2 (L x C)");
        H = 1, W = act.shape[0], C = act.shape[1];
        if (pad_h != 0) throw Error("sparse_conv: 1-D convolution takes no height padding");
    } else {
        if (act.rank() != 3) throw Error("sparse_conv: 2-D activation must be rank 3 (H x W x C)");
        H = act.shape[0], W = act.shape[1], C = act.shape[2];
    }
    const uint32_t Hp = H + 2 * pad_h, Wp = W + 2 * pad_w;
    std::vector<float> data(size_t(Hp) * Wp * C, 0.0f);
    for (uint32_t y = 0; y < H; ++y)
        for (uint32_t x = 0; x < W; ++x)
            std::copy_n(act.data.begin() + (size_t(y) * W + x) * C, C,
                        data.begin() + (size_t(y + pad_h) * Wp + (x + pad_w)) * C);
    return make_tensor({Hp, Wp, C}, std::move(data));
}

} // namespace

DenseTensor sparse_conv(const GsBsrMatrix& g, const DenseTensor& act, uint32_t stride_h,
                        uint32_t stride_w, uint32_t pad_h, uint32_t pad_w, KernelTrace* trace) {
    g.check();
    if (!g.conv) throw Error("sparse_conv: matrix carries no conv geometry");
    if (stride_h == 0 || stride_w == 0) throw Error("sparse_conv: stride must be positive");
    const ConvGeometry& geo = *g.conv;
    const bool one_dim = (geo.layout == ConvGeometry::Layout::OLI);

    const DenseTensor padded = pad_activation(act, one_dim, pad_h, pad_w);
    const uint32_t H = padded.shape[0], W = padded.shape[1], C = padded.shape[2];
    if (W != geo.act_width)
        throw Error("sparse_conv: activation width " + std::to_string(W) +
                    " (after padding) != encoded act_width " + std::to_string(geo.act_width) +
                    "; re-encode with --act-width " + std::to_string(W));
    if (C != geo.in_channels)
        throw Error("sparse_conv: activation channels " + std::to_string(C) +
                    " != filter in_channels " + std::to_string(geo.in_channels));
    if (H < geo.kernel_h || W < geo.kernel_w)
        throw Error("sparse_conv: activation smaller than kernel");

    const uint32_t H_out = (H - geo.kernel_h) / stride_h + 1;
    const uint32_t W_out = (W - geo.kernel_w) / stride_w + 1;
    const uint32_t B = g.banks(), k = g.elems_per_row(), brows = g.band_rows();
    const size_t act_size = padded.data.size();
    if (trace) trace->banks = B;

    std::vector<float> out(size_t(g.rows) * H_out * W_out, 0.0f);
    std::vector<double> acc(B), lanes(std::max<uint32_t>(k, 1));
    std::vector<uint32_t> addrs(B);
    for (uint32_t band = 0; band < g.band_count(); ++band) {
        for (uint32_t oy = 0; oy < H_out; ++oy) {
            for (uint32_t ox = 0; ox < W_out; ++ox) {
                const uint32_t origin = (oy * stride_h * W + ox * stride_w) * C;
                std::fill(acc.begin(), acc.end(), 0.0f);
                for (uint32_t gi = g.indptr[band]; gi < g.indptr[band + 1]; ++gi) {
                    const uint32_t* idx = g.indices.data() + size_t(gi) * B;
                    const float* val = g.values.data() + size_t(gi) * B;
                    for (uint32_t j = 0; j < B; ++j) {
                        const uint32_t addr = origin + idx[j];
                        if (addr >= act_size)
                            throw Error("sparse_conv: out-of-bounds gather at address " +
                                        std::to_string(addr));
                        acc[j] += double(padded.data[addr] * val[j]);
                        addrs[j] = addr;
                    }
                    trace_gather(trace, addrs.data(), B);
                }
                for (uint32_t lr = 0; lr < brows; ++lr) {
                    std::copy_n(acc.begin() + size_t(lr) * k, k, lanes.begin());
                    const uint32_t banded = band * brows + lr;
                    const uint32_t o = g.row_perm ? (*g.row_perm)[banded] : banded;
                    out[(size_t(o) * H_out + oy) * W_out + ox] =
                        static_cast<float>(tree_reduce(lanes.data(), k));
                }
            }
        }
    }
    if (one_dim) return make_tensor({g.rows, W_out}, std::move(out));
    return make_tensor({g.rows, H_out, W_out}, std::move(out));
}

std::vector<float> dense_matvec(const DenseTensor& w2d, const std::vector<float>& act) {
    w2d.check();
    if (w2d.rank() != 2) throw Error("dense_matvec: weights must be rank 2");
    const uint32_t m = w2d.shape[0], n = w2d.shape[1];
    if (act.size() != n) throw Error("dense_matvec: activation length != cols");
    std::vector<float> result(m, 0.0f);
    for (uint32_t i = 0; i < m; ++i) {
        double sum = 0.0;
        const float* row = w2d.data.data() + size_t(i) * n;
        for (uint32_t j = 0; j < n; ++j) sum += double(row[j] * act[j]);
        result[i] = static_cast<float>(sum);
    }
    return result;
}

DenseTensor dense_matvec(const DenseTensor& w2d, const DenseTensor& act) {
    act.check();
    if (act.rank() != 1) throw Error("dense_matvec: activation must be rank 1");
    return make_tensor({w2d.shape[0]}, dense_matvec(w2d, act.data));
}

DenseTensor dense_conv(const DenseTensor& w4d, const DenseTensor& act, uint32_t stride_h,
                       uint32_t stride_w, uint32_t pad_h, uint32_t pad_w) {
    w4d.check();
    act.check();
    if (w4d.rank() != 4) throw Error("dense_conv: weights must be rank 4 (O,h,w,I)");
    if (act.rank() != 3) throw Error("dense_conv: activation must be rank 3 (H,W,C)");
    if (stride_h == 0 || stride_w == 0) throw Error("dense_conv: stride must be positive");
    const uint32_t O = w4d.shape[0], h = w4d.shape[1], w = w4d.shape[2], I = w4d.shape[3];
    const uint32_t H = act.shape[0], W = act.shape[1], C = act.shape[2];
    if (C != I) throw Error("dense_conv: channel mismatch");
    const uint32_t Hp = H + 2 * pad_h, Wp = W + 2 * pad_w;
    if (Hp < h || Wp < w) throw Error("dense_conv: activation smaller than kernel");
    const uint32_t H_out = (Hp - h) / stride_h + 1;
    const uint32_t W_out = (Wp - w) / stride_w + 1;

    std::vector<float> out(size_t(O) * H_out * W_out, 0.0f);
    for (uint32_t o = 0; o < O; ++o) {
        for (uint32_t oy = 0; oy < H_out; ++oy) {
            for (uint32_t ox = 0; ox < W_out; ++ox) {
                double sum = 0.0;
                for (uint32_t ky = 0; ky < h; ++ky) {
                    const int64_t ay = int64_t(oy) * stride_h + ky - pad_h;
                    if (ay < 0 || ay >= H) continue;
                    for (uint32_t kx = 0; kx < w; ++kx) {
                        const int64_t ax = int64_t(ox) * stride_w + kx - pad_w;
                        if (ax < 0 || ax >= W) continue;
                        const float* wrow =
                            w4d.data.data() + ((size_t(o) * h + ky) * w + kx) * I;
                        const float* arow = act.data.data() + (size_t(ay) * W + ax) * C;
                        for (uint32_t c = 0; c < I; ++c) sum += double(wrow[c] * arow[c]);
                    }
                }
                out[(size_t(o) * H_out + oy) * W_out + ox] = static_cast<float>(sum);
            }
        }
    }
    return make_tensor({O, H_out, W_out}, std::move(out));
}

} // namespace gs
