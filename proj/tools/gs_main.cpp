// gs - gather/scatter balanced sparsity toolkit.
//
// Subcommands: gen, prune, encode, decode, stats, run (spmv|conv), bench,
// motivate. All randomized commands honor --seed for bit-exact reruns;
// domain errors exit 1, usage errors exit 2.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gs/gsformat.hpp"
#include "gs/kernels.hpp"
#include "gs/patterns.hpp"
#include "gs/pruner.hpp"
#include "gs/tcm_model.hpp"
#include "gs/tensor.hpp"

using nlohmann::json;

namespace {

bool g_json = false;
bool g_quiet = false;

void note(const std::string& line) {
    if (!g_quiet && !g_json) std::cout << line << "\n";
}

std::vector<uint32_t> parse_shape(const std::string& s) {
    std::vector<uint32_t> shape;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find('x', pos);
        if (next == std::string::npos) next = s.size();
        const std::string tok = s.substr(pos, next - pos);
        try {
            const unsigned long v = std::stoul(tok);
            if (v == 0 || v > 0xffffffffull) throw gs::Error("");
            shape.push_back(static_cast<uint32_t>(v));
        } catch (...) {
            throw gs::Error("bad shape '" + s + "' (expected e.g. 1024x1024)");
        }
        pos = next + 1;
    }
    if (shape.empty() || shape.size() > 4)
        throw gs::Error("shape must have 1..4 extents");
    return shape;
}

gs::Distribution parse_dist(const std::string& s) {
    const size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw gs::Error("bad distribution '" + s + "' (expected uniform:lo,hi or gaussian:mean,std)");
    const std::string head = s.substr(0, colon);
    float a = 0, b = 0;
    char trail = 0;
    if (std::sscanf(s.c_str() + colon + 1, "%f,%f%c", &a, &b, &trail) != 2)
        throw gs::Error("bad distribution parameters in '" + s + "'");
    if (head == "uniform") return gs::UniformDist{a, b};
    if (head == "gaussian") return gs::GaussianDist{a, b};
    throw gs::Error("unknown distribution '" + head + "'");
}

std::pair<uint32_t, uint32_t> parse_pair(const std::string& s, const char* what) {
    unsigned a = 0, b = 0;
    char trail = 0;
    const int n = std::sscanf(s.c_str(), "%u,%u%c", &a, &b, &trail);
    if (n == 2) return {a, b};
    if (std::sscanf(s.c_str(), "%u%c", &a, &trail) == 1) return {a, a};
    throw gs::Error(std::string("bad ") + what + " '" + s + "' (expected N or N,N)");
}

gs::Dtype parse_dtype(const std::string& s) {
    if (s == "f32") return gs::Dtype::F32;
    if (s == "f16") return gs::Dtype::F16;
    if (s == "i16") return gs::Dtype::I16;
    throw gs::Error("unknown dtype '" + s + "'");
}

void emit(const json& j, const std::string& text) {
    if (g_json)
        std::cout << j.dump() << "\n";
    else
        std::cout << text;
}

// Flattens rank-3 (OLI) and rank-4 (OhwI) weight tensors onto the 2-D view;
// rank-2 passes through. Returns the geometry template (without act_width).
gs::DenseTensor flatten_weights(const gs::DenseTensor& w, std::optional<gs::ConvGeometry>& geo) {
    if (w.rank() == 2) return w;
    gs::ConvGeometry g;
    if (w.rank() == 3) {
        g.layout = gs::ConvGeometry::Layout::OLI;
        g.out_channels = w.shape[0];
        g.kernel_h = 1;
        g.kernel_w = w.shape[1];
        g.in_channels = w.shape[2];
    } else {
        g.layout = gs::ConvGeometry::Layout::OhwI;
        g.out_channels = w.shape[0];
        g.kernel_h = w.shape[1];
        g.kernel_w = w.shape[2];
        g.in_channels = w.shape[3];
    }
    g.act_channels = g.in_channels;
    geo = g;
    return gs::make_tensor({g.out_channels, g.kernel_h * g.kernel_w * g.in_channels}, w.data,
                           w.dtype);
}

struct PruneArgs {
    std::string input;
    std::string pattern;
    double sparsity = 0.9;
    std::optional<float> threshold;
    std::string output;
    std::string mask_out;
    bool report = false;
    bool pad_rows = false;
    uint32_t act_width = 0;
    uint32_t act_channels = 0;
};

void run_prune(const PruneArgs& args) {
    const gs::PatternDescriptor p = gs::parse_pattern_flag(args.pattern);
    gs::DenseTensor loaded = gs::load_tensor(args.input);
    std::optional<gs::ConvGeometry> geo;
    gs::DenseTensor w = flatten_weights(loaded, geo);

    if (args.pad_rows && p.family != gs::PatternFamily::Irregular) {
        const uint32_t band = p.band_rows();
        const uint32_t m = w.shape[0];
        if (m % band != 0) {
            const uint32_t padded = (m / band + 1) * band;
            w.data.resize(size_t(padded) * w.shape[1], 0.0f);
            w.shape[0] = padded;
            if (geo) geo->out_channels = padded;
            note("padded rows " + std::to_string(m) + " -> " + std::to_string(padded));
        }
    }

    gs::ThresholdSpec th = args.threshold ? gs::ThresholdSpec::external(*args.threshold)
                                          : gs::ThresholdSpec::per_matrix(args.sparsity);

    if (geo) {
        if (args.act_width != 0) {
            geo->act_width = args.act_width;
            geo->act_channels = args.act_channels ? args.act_channels : geo->in_channels;
            geo->check();
        } else if (!args.output.empty()) {
            throw gs::Error("conv weights need --act-width to encode a GSSF file");
        } else {
            geo.reset();
        }
    }

    gs::MaskMatrix mask;
    uint64_t group_count = 0;
    std::optional<gs::GsBsrMatrix> encoded;

    switch (p.family) {
        case gs::PatternFamily::Irregular: {
            if (!args.output.empty())
                throw gs::Error("irregular patterns have no GSSF form; use --mask-out");
            const float t = gs::resolve_threshold(w, th);
            mask = gs::MaskMatrix::zeros(w.shape[0], w.shape[1]);
            for (uint32_t r = 0; r < w.shape[0]; ++r)
                for (uint32_t c = 0; c < w.shape[1]; ++c)
                    if (std::abs(w.data[size_t(r) * w.shape[1] + c]) > t) mask.set(r, c, 1);
            break;
        }
        case gs::PatternFamily::Block: {
            mask = gs::prune_block(w, p.banks, p.elems_per_row, th);
            if (!args.output.empty()) {
                if (p.elems_per_row != p.banks)
                    throw gs::Error("block:B=" + std::to_string(p.banks) + ",k=" +
                                    std::to_string(p.elems_per_row) +
                                    " is not encodable as GSSF (needs k == B); use --mask-out");
                gs::GroupedMask gm =
                    gs::group_mask(mask, {gs::PatternFamily::GsHybrid, p.banks, p.banks});
                encoded = gs::encode(w, gm, p, geo);
                group_count = encoded->group_count();
            }
            break;
        }
        case gs::PatternFamily::GsHybrid:
        case gs::PatternFamily::GsScatter: {
            gs::GroupedMask gm;
            if (p.family == gs::PatternFamily::GsScatter)
                gm = gs::prune_gs_scatter(w, p.banks, p.elems_per_row, th);
            else if (p.is_horizontal())
                gm = gs::prune_gs_horizontal(w, p.banks, th);
            else
                gm = gs::prune_gs_band(w, p.banks, p.elems_per_row, th);
            mask = gm.mask;
            group_count = gm.groups.size();
            if (!args.output.empty()) encoded = gs::encode(w, gm, p, geo);
            break;
        }
    }

    if (encoded) {
        gs::save_gssf(*encoded, args.output);
        note("wrote " + args.output);
    }
    if (!args.mask_out.empty()) {
        gs::save_tensor(gs::mask_to_tensor(mask), args.mask_out);
        note("wrote " + args.mask_out);
    }

    if (args.report || g_json) {
        const uint64_t total = uint64_t(w.shape[0]) * w.shape[1];
        const double realized = 1.0 - double(mask.nnz()) / double(total);
        const double kept = gs::kept_magnitude(w, mask);
        json j{{"schema", 1},
               {"pattern", gs::pattern_to_string(p)},
               {"rows", w.shape[0]},
               {"cols", w.shape[1]},
               {"requested_sparsity", args.sparsity},
               {"realized_sparsity", realized},
               {"kept_magnitude", kept},
               {"group_count", group_count}};
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "pattern: %s\nrealized sparsity: %.6f\nkept magnitude: %.6f\ngroups: %llu\n",
                      gs::pattern_to_string(p).c_str(), realized, kept,
                      static_cast<unsigned long long>(group_count));
        emit(j, buf);
    }
}

void run_encode(const std::string& input, const std::string& mask_path,
                const std::string& pattern, const std::string& output, uint32_t act_width,
                uint32_t act_channels) {
    gs::PatternDescriptor p = gs::parse_pattern_flag(pattern);
    if (p.family == gs::PatternFamily::Irregular)
        throw gs::Error("irregular patterns have no GSSF form");
    if (p.family == gs::PatternFamily::GsScatter)
        throw gs::Error("scatter encodings come from 'gs prune' (the permutation is chosen there)");

    gs::DenseTensor loaded = gs::load_tensor(input);
    std::optional<gs::ConvGeometry> geo;
    const gs::DenseTensor w = flatten_weights(loaded, geo);
    if (geo) {
        if (act_width == 0) throw gs::Error("conv weights need --act-width");
        geo->act_width = act_width;
        geo->act_channels = act_channels ? act_channels : geo->in_channels;
        geo->check();
    }
    const gs::MaskMatrix mask = gs::mask_from_tensor(gs::load_tensor(mask_path));

    if (p.family == gs::PatternFamily::Block) {
        if (p.elems_per_row != p.banks)
            throw gs::Error("block patterns are encodable only with k == B");
        const gs::ValidationReport rep = gs::validate_block_mask(mask, p);
        if (!rep.valid) throw gs::Error("mask is not block-valid: " + rep.detail);
    }
    const gs::PatternDescriptor gs_p{gs::PatternFamily::GsHybrid, p.banks,
                                     p.family == gs::PatternFamily::Block ? p.banks
                                                                          : p.elems_per_row};
    const gs::GroupedMask gm = gs::group_mask(mask, gs_p);
    const gs::GsBsrMatrix g = gs::encode(w, gm, p, geo);
    gs::save_gssf(g, output);
    note("wrote " + output);
}

void run_decode(const std::string& input, const std::string& output) {
    const gs::GsBsrMatrix g = gs::load_gssf(input);
    gs::save_tensor(gs::decode(g), output);
    note("wrote " + output);
}

void run_stats(const std::string& mask_path, const std::string& pattern,
               const std::string& gssf_path) {
    if (!gssf_path.empty()) {
        const gs::GsBsrMatrix g = gs::load_gssf(gssf_path);
        const uint64_t nnz = g.nnz();
        const double sparsity = 1.0 - double(nnz) / (double(g.rows) * g.cols);
        json j{{"schema", 1},
               {"pattern", gs::pattern_to_string(g.pattern)},
               {"rows", g.rows},
               {"cols", g.cols},
               {"groups", g.group_count()},
               {"bands", g.band_count()},
               {"nnz", nnz},
               {"sparsity", sparsity},
               {"conv", g.conv.has_value()}};
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "pattern: %s\nrows x cols: %u x %u\ngroups: %llu\nnnz: %llu\nsparsity: %.6f\n",
                      gs::pattern_to_string(g.pattern).c_str(), g.rows, g.cols,
                      static_cast<unsigned long long>(g.group_count()),
                      static_cast<unsigned long long>(nnz), sparsity);
        emit(j, buf);
        return;
    }

    if (mask_path.empty()) throw gs::Error("stats needs --mask or --gssf");
    const gs::PatternDescriptor p = gs::parse_pattern_flag(pattern);
    const gs::MaskMatrix mask = gs::mask_from_tensor(gs::load_tensor(mask_path));

    gs::ValidationReport rep;
    if (p.family == gs::PatternFamily::Block) {
        rep = gs::validate_block_mask(mask, p);
    } else if (p.family == gs::PatternFamily::Irregular) {
        rep.valid = true; // anything goes
    } else {
        // Scatter masks validate as hybrid under the identity permutation.
        gs::PatternDescriptor hy = p;
        hy.family = gs::PatternFamily::GsHybrid;
        rep = gs::validate_gs_mask(mask, hy);
    }
    const std::vector<uint64_t> hist =
        gs::residue_histogram(mask, p.family == gs::PatternFamily::Irregular ? 8 : p.banks);

    json j{{"schema", 1},
           {"pattern", gs::pattern_to_string(p)},
           {"valid", rep.valid},
           {"detail", rep.detail},
           {"residue_histogram", hist}};
    std::string text = std::string("valid: ") + (rep.valid ? "yes" : "no") + "\n";
    if (!rep.valid) text += "first violation: " + rep.detail + "\n";
    text += "residue histogram:";
    for (uint64_t h : hist) text += " " + std::to_string(h);
    text += "\n";
    emit(j, text);
}

void run_kernel(bool conv, const std::string& weights, const std::string& act_path,
                const std::string& output, const std::string& stride, const std::string& pad,
                const std::string& trace_path) {
    const gs::GsBsrMatrix g = gs::load_gssf(weights);
    const gs::DenseTensor act = gs::load_tensor(act_path);
    gs::KernelTrace trace;
    gs::KernelTrace* tp = trace_path.empty() ? nullptr : &trace;

    gs::DenseTensor out;
    if (conv) {
        const auto [sh, sw] = parse_pair(stride, "stride");
        const auto [ph, pw] = parse_pair(pad, "pad");
        out = gs::sparse_conv(g, act, sh, sw, ph, pw, tp);
    } else {
        out = gs::spmv(g, act, tp);
    }
    gs::save_tensor(out, output);
    note("wrote " + output);
    if (tp) {
        gs::save_trace(trace, trace_path);
        note("wrote " + trace_path);
    }
}

void run_bench(const std::string& gssf_path, const std::string& trace_path, uint32_t banks,
               const std::vector<std::string>& params, bool report_json) {
    gs::TcmConfig cfg;
    gs::CostParams cost;
    for (const std::string& kv : params) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) throw gs::Error("bad --param '" + kv + "' (expected key=value)");
        const std::string key = kv.substr(0, eq);
        const double value = std::atof(kv.c_str() + eq + 1);
        if (key == "gather_base")
            cfg.gather_base_cycles = static_cast<uint32_t>(value);
        else if (key == "conflict_penalty")
            cfg.conflict_penalty_cycles = static_cast<uint32_t>(value);
        else if (key == "weight_load")
            cost.weight_load_cycles = value;
        else if (key == "index_load")
            cost.index_load_cycles = value;
        else if (key == "mac")
            cost.mac_cycles = value;
        else if (key == "outer")
            cost.outer_overhead_cycles = value;
        else
            throw gs::Error("unknown --param key '" + key + "'");
    }

    const bool json_out = report_json || g_json;
    if (!trace_path.empty()) {
        const gs::KernelTrace trace = gs::load_trace(trace_path, banks);
        cfg.banks = trace.banks ? trace.banks : banks;
        if (cfg.banks == 0) throw gs::Error("empty trace needs --banks");
        const gs::AccessReport rep = gs::trace_cost(trace, cfg);
        json j{{"schema", 1},
               {"total_gathers", rep.total_gathers},
               {"serialized_accesses", rep.serialized_accesses},
               {"ideal_accesses", rep.ideal_accesses},
               {"ratio", rep.ratio}};
        char buf[256];
        std::snprintf(buf, sizeof(buf), "gathers: %llu\nserialized: %llu\nideal: %llu\nratio: %.6f\n",
                      static_cast<unsigned long long>(rep.total_gathers),
                      static_cast<unsigned long long>(rep.serialized_accesses),
                      static_cast<unsigned long long>(rep.ideal_accesses), rep.ratio);
        if (json_out)
            std::cout << j.dump() << "\n";
        else
            std::cout << buf;
        return;
    }

    if (gssf_path.empty()) throw gs::Error("bench needs --gssf or --trace");
    const gs::GsBsrMatrix g = gs::load_gssf(gssf_path);
    cfg.banks = g.banks();
    const gs::KernelDescriptor desc = gs::descriptor_for(g);
    const gs::CycleEstimate est = gs::estimate_cycles(desc, cfg, cost);
    // GS groups are conflict-free, so one serialized access per gather.
    const uint64_t serialized = g.group_count();
    json j{{"schema", 1},
           {"pattern", gs::pattern_to_string(g.pattern)},
           {"cycles", est.cycles},
           {"dense_cycles", est.dense_cycles},
           {"speedup", est.speedup},
           {"serialized_accesses", serialized},
           {"ideal_accesses", serialized}};
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "pattern: %s\ncycles: %.0f\ndense cycles: %.0f\nspeedup: %.4f\n"
                  "serialized accesses: %llu\nideal accesses: %llu\n",
                  gs::pattern_to_string(g.pattern).c_str(), est.cycles, est.dense_cycles,
                  est.speedup, static_cast<unsigned long long>(serialized),
                  static_cast<unsigned long long>(serialized));
    if (json_out)
        std::cout << j.dump() << "\n";
    else
        std::cout << buf;
}

void run_motivate(uint32_t m, uint32_t n, double sparsity, uint32_t banks, uint32_t trials,
                  uint64_t seed, const std::string& mask_path) {
    gs::AccessRatios ratios;
    if (!mask_path.empty()) {
        const gs::MaskMatrix mask = gs::mask_from_tensor(gs::load_tensor(mask_path));
        ratios = gs::mask_access_ratios(mask, banks);
    } else {
        ratios = gs::access_ratio_experiment(m, n, sparsity, banks, trials, seed);
    }
    json j{{"schema", 1},
           {"m", m},
           {"n", n},
           {"sparsity", sparsity},
           {"banks", banks},
           {"trials", trials},
           {"seed", seed},
           {"ascending_ratio", ratios.ascending_ratio},
           {"reorder_ratio", ratios.reorder_ratio}};
    char buf[160];
    std::snprintf(buf, sizeof(buf), "ascending_ratio: %.6f\nreorder_ratio: %.6f\n",
                  ratios.ascending_ratio, ratios.reorder_ratio);
    emit(j, buf);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gather-scatter balanced sparsity toolkit"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "machine-readable output");
    app.add_flag("--quiet", g_quiet, "suppress informational notes");
    app.fallthrough();
    app.footer(
        "File formats (all little-endian):\n"
        "  DTNS  magic \"DTNS\" | version u16=1 | dtype u8 (0=f32,1=f16,2=i16) | rank u8\n"
        "        | rank x u32 extents | row-major payload\n"
        "  GSSF  magic \"GSSF\" | version u16=1 | family u8 (0=gs,1=gs-scatter,2=block-as-gs)\n"
        "        | B u16 | k u16 | tensor-kind u8 (0=matrix,1=conv1d,2=conv2d) | m u32 | n u32\n"
        "        | [conv: O,h,w,I,W_act,C u32 each] | group_count u32\n"
        "        | indptr (bands+1) x u32 | indices groups x B x u32 | values groups x B x f32\n"
        "        | [scatter: m x u32 row_perm]\n"
        "  trace group_count u32, then B x u32 gathered addresses per group\n"
        "  JSON  objects carry \"schema\": 1; bench emits {pattern, cycles, dense_cycles,\n"
        "        speedup, serialized_accesses, ideal_accesses}");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic DTNS tensor");
    std::string gen_shape, gen_dist = "uniform:0,1", gen_out, gen_dtype = "f32";
    uint64_t gen_seed = 0;
    gen->add_option("--shape", gen_shape, "e.g. 1024x1024")->required();
    gen->add_option("--dist", gen_dist, "uniform:lo,hi | gaussian:mean,std");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--dtype", gen_dtype, "f32 | f16 | i16");
    gen->add_option("-o,--output", gen_out, "output .dtns path")->required();
    gen->callback([&] {
        const gs::DenseTensor t = gs::gen_tensor(parse_shape(gen_shape), parse_dist(gen_dist),
                                                 gen_seed, parse_dtype(gen_dtype));
        gs::save_tensor(t, gen_out);
        note("wrote " + gen_out);
    });

    // prune
    auto* prune = app.add_subcommand("prune", "magnitude-prune weights into a GS pattern");
    PruneArgs pa;
    prune->add_option("-i,--input", pa.input, "dense weights (.dtns, rank 2/3/4)")->required();
    prune->add_option("--pattern", pa.pattern,
                      "gs:B=,k= | gs-scatter:B=,k= | block:B=,k= | irregular")
        ->required();
    prune->add_option("--sparsity", pa.sparsity, "target sparsity fraction");
    double th_value = -1.0;
    auto* th_opt = prune->add_option("--threshold", th_value, "external magnitude threshold");
    prune->add_option("-o,--output", pa.output, "encoded output (.gssf)");
    prune->add_option("--mask-out", pa.mask_out, "write the 0/1 mask (.dtns)");
    prune->add_flag("--report", pa.report, "print realized sparsity / kept magnitude / groups");
    prune->add_flag("--pad-rows", pa.pad_rows, "zero-pad rows up to a band multiple");
    prune->add_option("--act-width", pa.act_width, "activation W bound into conv offsets");
    prune->add_option("--act-channels", pa.act_channels, "activation C (default: in_channels)");
    prune->callback([&] {
        if (th_opt->count()) pa.threshold = static_cast<float>(th_value);
        run_prune(pa);
    });

    // encode
    auto* enc = app.add_subcommand("encode", "encode dense weights + mask into GSSF");
    std::string enc_in, enc_mask, enc_pattern, enc_out;
    uint32_t enc_act_w = 0, enc_act_c = 0;
    enc->add_option("-i,--input", enc_in, "dense weights (.dtns)")->required();
    enc->add_option("--mask", enc_mask, "0/1 mask (.dtns, flattened 2-D)")->required();
    enc->add_option("--pattern", enc_pattern, "gs:B=,k= | block:B=,k=")->required();
    enc->add_option("-o,--output", enc_out, "output .gssf")->required();
    enc->add_option("--act-width", enc_act_w, "activation W for conv offsets");
    enc->add_option("--act-channels", enc_act_c, "activation C (default: in_channels)");
    enc->callback([&] { run_encode(enc_in, enc_mask, enc_pattern, enc_out, enc_act_w, enc_act_c); });

    // decode
    auto* dec = app.add_subcommand("decode", "decode GSSF back to masked dense weights");
    std::string dec_in, dec_out;
    dec->add_option("-i,--input", dec_in, "input .gssf")->required();
    dec->add_option("-o,--output", dec_out, "output .dtns")->required();
    dec->callback([&] { run_decode(dec_in, dec_out); });

    // stats
    auto* stats = app.add_subcommand("stats", "validate masks / inspect GSSF files");
    std::string st_mask, st_pattern = "gs:B=8,k=1", st_gssf;
    stats->add_option("--mask", st_mask, "mask tensor (.dtns)");
    stats->add_option("--pattern", st_pattern, "pattern to validate the mask against");
    stats->add_option("--gssf", st_gssf, "GSSF file to describe");
    stats->callback([&] { run_stats(st_mask, st_pattern, st_gssf); });

    // run
    auto* run = app.add_subcommand("run", "execute a sparse kernel");
    run->require_subcommand(1);
    std::string rw, rx, ro, rstride = "1,1", rpad = "0,0", rtrace;
    auto* spmv_cmd = run->add_subcommand("spmv", "sparse matrix x dense vector");
    spmv_cmd->add_option("-w,--weights", rw, "GSSF weights")->required();
    spmv_cmd->add_option("-x,--activations", rx, "activation vector (.dtns)")->required();
    spmv_cmd->add_option("-o,--output", ro, "output .dtns")->required();
    spmv_cmd->add_option("--trace", rtrace, "write gather trace");
    spmv_cmd->callback([&] { run_kernel(false, rw, rx, ro, rstride, rpad, rtrace); });
    auto* conv_cmd = run->add_subcommand("conv", "sparse convolution");
    conv_cmd->add_option("-w,--weights", rw, "GSSF conv weights")->required();
    conv_cmd->add_option("-x,--activations", rx, "activations HxWxC / LxC (.dtns)")->required();
    conv_cmd->add_option("-o,--output", ro, "output .dtns")->required();
    conv_cmd->add_option("--stride", rstride, "stride (h,w or single)");
    conv_cmd->add_option("--pad", rpad, "zero padding (h,w or single)");
    conv_cmd->add_option("--trace", rtrace, "write gather trace");
    conv_cmd->callback([&] { run_kernel(true, rw, rx, ro, rstride, rpad, rtrace); });

    // bench
    auto* bench = app.add_subcommand("bench", "cost-model estimate for a GSSF file or trace");
    std::string be_gssf, be_trace, be_report = "text";
    uint32_t be_banks = 0;
    std::vector<std::string> be_params;
    bench->add_option("--gssf", be_gssf, "GSSF file");
    bench->add_option("--trace", be_trace, "kernel trace file");
    bench->add_option("--banks", be_banks, "bank count (trace analysis)");
    bench->add_option("--param", be_params,
                      "cost overrides: gather_base, conflict_penalty, weight_load, index_load, "
                      "mac, outer");
    bench->add_option("--report", be_report, "text | json");
    bench->callback([&] {
        if (be_report != "text" && be_report != "json")
            throw gs::Error("--report must be text or json");
        run_bench(be_gssf, be_trace, be_banks, be_params, be_report == "json");
    });

    // motivate
    auto* mot = app.add_subcommand("motivate", "irregular-CSR access-ratio experiment");
    uint32_t mo_m = 1024, mo_n = 1024, mo_banks = 16, mo_trials = 10;
    double mo_sparsity = 0.9;
    uint64_t mo_seed = 42;
    std::string mo_mask;
    mot->add_option("--m", mo_m, "rows");
    mot->add_option("--n", mo_n, "cols");
    mot->add_option("--sparsity", mo_sparsity, "i.i.d. mask sparsity");
    mot->add_option("--banks", mo_banks, "TCM sub-banks");
    mot->add_option("--trials", mo_trials, "Monte-Carlo trials");
    mot->add_option("--seed", mo_seed, "experiment seed");
    mot->add_option("--mask", mo_mask, "use a real mask file instead of sampling");
    mot->callback(
        [&] { run_motivate(mo_m, mo_n, mo_sparsity, mo_banks, mo_trials, mo_seed, mo_mask); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "(run with --help for usage)\n";
        return 2;
    } catch (const gs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
