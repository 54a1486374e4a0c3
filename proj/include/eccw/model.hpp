#pragma once

// Transformer decoders over the magnitude/syndrome token split. Two
// architectures share one parameter layout: the cross attention decoder keeps
// magnitude and syndrome tokens in separate streams and lets each layer run
// its attention twice (magnitudes query syndromes, then syndromes query the
// refreshed magnitudes, with the same projection weights both times); the
// self attention baseline concatenates both token groups into one sequence.
// Keeping the tensor list identical between the two makes parameter counts
// equal by construction.

#include "eccw/channel.hpp"
#include "eccw/code.hpp"
#include "eccw/masks.hpp"
#include "eccw/rng.hpp"
#include "eccw/tensor.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eccw {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Arch { crossmpt, ecct };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& s);

struct ModelConfig {
    Arch arch = Arch::crossmpt;
    int n = 0;       // bit tokens, one per code bit
    int checks = 0;  // syndrome tokens, one per row of H as loaded
    int layers = 6;
    int dim = 128;
    int heads = 8;
    int ffn_mult = 4;
    bool bipolar_syndrome = true;     // embed syndrome bit b as 1-2b rather than b
    bool ablate_self_blocks = false;  // ecct only: keep just the diagonal of the self blocks

    int seq_len() const { return n + checks; }
};

template <class T>
struct NamedTensor {
    std::string name;
    int rows = 0, cols = 0;
    std::vector<T> v;

    size_t size() const { return v.size(); }
};

template <class T>
struct ModelParamsT {
    ModelConfig cfg;
    std::vector<NamedTensor<T>> tensors;

    size_t index_of(const std::string& name) const {
        for (size_t i = 0; i < tensors.size(); ++i)
            if (tensors[i].name == name) return i;
        throw ModelError("no parameter tensor named " + name);
    }
    NamedTensor<T>& at(const std::string& name) { return tensors[index_of(name)]; }
    const NamedTensor<T>& at(const std::string& name) const { return tensors[index_of(name)]; }

    long long count() const {
        long long s = 0;
        for (const auto& t : tensors) s += static_cast<long long>(t.size());
        return s;
    }
};

using ModelParams = ModelParamsT<float>;

// Total learnable scalars for a config, in closed form. count() on an
// instantiated parameter set must agree with this.
long long param_count(const ModelConfig& cfg);

// Canonical tensor list, zero filled. The order here is the checkpoint and
// optimizer order.
template <class T>
ModelParamsT<T> make_params(const ModelConfig& cfg) {
    if (cfg.n <= 0 || cfg.checks <= 0) throw ModelError("model needs positive token counts");
    if (cfg.layers <= 0 || cfg.dim <= 0 || cfg.ffn_mult <= 0)
        throw ModelError("model needs positive depth and width");
    if (cfg.heads <= 0 || cfg.dim % cfg.heads != 0)
        throw ModelError("embedding dim must divide evenly into heads");
    ModelParamsT<T> p;
    p.cfg = cfg;
    const int d = cfg.dim, f = cfg.ffn_mult * cfg.dim, L = cfg.seq_len();
    auto add = [&](const std::string& name, int r, int c) {
        NamedTensor<T> t;
        t.name = name;
        t.rows = r;
        t.cols = c;
        t.v.assign(static_cast<size_t>(r) * c, T(0));
        p.tensors.push_back(std::move(t));
    };
    add("embed.pos", L, d);
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string pre = "layers." + std::to_string(l) + ".";
        add(pre + "attn.wq", d, d);
        add(pre + "attn.bq", 1, d);
        add(pre + "attn.wk", d, d);
        add(pre + "attn.bk", 1, d);
        add(pre + "attn.wv", d, d);
        add(pre + "attn.bv", 1, d);
        add(pre + "attn.wo", d, d);
        add(pre + "attn.bo", 1, d);
        add(pre + "ffn.w1", d, f);
        add(pre + "ffn.b1", 1, f);
        add(pre + "ffn.w2", f, d);
        add(pre + "ffn.b2", 1, d);
        add(pre + "ln_attn.gain", 1, d);
        add(pre + "ln_attn.bias", 1, d);
        add(pre + "ln_ffn.gain", 1, d);
        add(pre + "ln_ffn.bias", 1, d);
    }
    add("head.ln.gain", 1, d);
    add("head.ln.bias", 1, d);
    add("head.fc1.w", d, 1);
    add("head.fc1.b", 1, 1);
    add("head.fc2.w", L, cfg.n);
    add("head.fc2.b", 1, cfg.n);
    return p;
}

// Xavier uniform on weight matrices and the positional table, zeros on
// biases, ones on layernorm gains. Fill order is the tensor order, so one
// seed fixes every weight.
template <class T>
void init_params(ModelParamsT<T>& p, std::uint64_t seed) {
    Rng rng(mix_seed(seed, {0x494e4954}));
    for (auto& t : p.tensors) {
        const bool gain = t.name.size() >= 4 && t.name.compare(t.name.size() - 4, 4, "gain") == 0;
        if (gain) {
            std::fill(t.v.begin(), t.v.end(), T(1));
        } else if (t.rows == 1) {  // every 1-row tensor that is not a gain is a bias
            std::fill(t.v.begin(), t.v.end(), T(0));
        } else {
            const T bound = std::sqrt(T(6) / (T(t.rows) + T(t.cols)));
            for (auto& x : t.v) x = static_cast<T>(2.0 * uniform01(rng) - 1.0) * bound;
        }
    }
}

template <class T>
ModelParamsT<T> init_params(const ModelConfig& cfg, std::uint64_t seed) {
    auto p = make_params<T>(cfg);
    init_params(p, seed);
    return p;
}

// Additive masks in the scalar type the tape runs at. Built once per model,
// not per forward pass. A query row with no admissible key would make the
// softmax undefined, so such codes are rejected here with the offending row.
template <class T>
struct ModelMasksT {
    std::vector<T> m2s;   // n x checks
    std::vector<T> s2m;   // checks x n
    std::vector<T> self;  // seq x seq
};

using ModelMasks = ModelMasksT<float>;

namespace detail {
template <class T>
void check_mask_rows(const AttentionMask& m, const char* which) {
    for (int r = 0; r < m.rows; ++r) {
        bool any = false;
        for (int c = 0; c < m.cols && !any; ++c) any = m.at(r, c) != 0;
        if (!any)
            throw ModelError(std::string("mask ") + which + " row " + std::to_string(r) +
                             " admits no keys; the code leaves this token unconnected");
    }
}
} // namespace detail

template <class T>
ModelMasksT<T> prepare_masks(const ModelConfig& cfg, const BitMatrix& H) {
    if (H.cols() != cfg.n || H.rows() != cfg.checks)
        throw ModelError("parity matrix shape does not match the model config");
    ModelMasksT<T> out;
    if (cfg.arch == Arch::crossmpt) {
        MaskSet ms = build_crossmpt_masks(H);
        detail::check_mask_rows<T>(ms.m2s, "magnitude->syndrome");
        detail::check_mask_rows<T>(ms.s2m, "syndrome->magnitude");
        out.m2s = ms.m2s.template additive<T>();
        out.s2m = ms.s2m.template additive<T>();
    } else {
        AttentionMask m = build_ecct_mask(H, cfg.ablate_self_blocks);
        detail::check_mask_rows<T>(m, "self");
        out.self = m.template additive<T>();
    }
    return out;
}

// Forward graph handles. Attention probability nodes are kept per layer,
// block and head so callers can inspect what the decoder looked at.
template <class T>
struct ModelGraph {
    typename Tape<T>::Id logits = -1;           // batch x n
    std::vector<typename Tape<T>::Id> params;   // leaf ids aligned with tensors
    std::vector<std::vector<std::vector<typename Tape<T>::Id>>> scores;  // [layer][block][head]
};

// Builds the whole decoder as one tape. Inputs are sample major: magnitudes
// holds batch*n entries, syndromes holds batch*checks entries already mapped
// through the syndrome embedding convention. Batched samples are stacked as
// equally tall row blocks and never mix; the masks repeat per sample.
template <class T>
ModelGraph<T> build_forward(Tape<T>& tape, const ModelParamsT<T>& params,
                            const ModelMasksT<T>& masks, const std::vector<T>& magnitudes,
                            const std::vector<T>& syndromes, int batch, bool needs_grad) {
    using Id = typename Tape<T>::Id;
    const ModelConfig& cfg = params.cfg;
    const int n = cfg.n, m = cfg.checks, d = cfg.dim, L = cfg.seq_len();
    const int dh = d / cfg.heads;
    if (magnitudes.size() != static_cast<size_t>(batch) * n ||
        syndromes.size() != static_cast<size_t>(batch) * m)
        throw ModelError("forward input length does not match batch and config");

    ModelGraph<T> g;
    g.params.reserve(params.tensors.size());
    for (const auto& t : params.tensors)
        g.params.push_back(needs_grad ? tape.param(t.rows, t.cols, t.v.data())
                                      : tape.input(t.rows, t.cols, t.v.data()));
    auto P = [&](const std::string& name) { return g.params[params.index_of(name)]; };

    g.scores.assign(cfg.layers, {});

    // One residual block: pre-norm attention (queries q, keys/values kv, both
    // normalized by the same layer norm) followed by a pre-norm FFN.
    auto block = [&](Id q, Id kv, const std::vector<T>& mask, int mask_rows, int layer,
                     int blk) -> Id {
        const std::string pre = "layers." + std::to_string(layer) + ".";
        Id qn = tape.layernorm(q, P(pre + "ln_attn.gain"), P(pre + "ln_attn.bias"));
        Id kn = kv == q ? qn : tape.layernorm(kv, P(pre + "ln_attn.gain"), P(pre + "ln_attn.bias"));
        Id Q = tape.add_rowvec(tape.matmul(qn, P(pre + "attn.wq")), P(pre + "attn.bq"));
        Id K = tape.add_rowvec(tape.matmul(kn, P(pre + "attn.wk")), P(pre + "attn.bk"));
        Id V = tape.add_rowvec(tape.matmul(kn, P(pre + "attn.wv")), P(pre + "attn.bv"));
        Id merged = -1;
        auto& score_slot = g.scores[layer];
        if (static_cast<int>(score_slot.size()) <= blk) score_slot.resize(blk + 1);
        for (int h = 0; h < cfg.heads; ++h) {
            Id Qh = tape.slice_cols(Q, h * dh, dh);
            Id Kh = tape.slice_cols(K, h * dh, dh);
            Id Vh = tape.slice_cols(V, h * dh, dh);
            Id raw = tape.scale(tape.bmm_nt(Qh, Kh, batch), T(1) / std::sqrt(T(dh)));
            Id prob = tape.masked_softmax_rows(raw, mask, mask_rows);
            score_slot[blk].push_back(prob);
            Id oh = tape.bmm_nn(prob, Vh, batch);
            merged = h == 0 ? oh : tape.concat_cols(merged, oh);
        }
        Id att = tape.add_rowvec(tape.matmul(merged, P(pre + "attn.wo")), P(pre + "attn.bo"));
        Id x1 = tape.add(q, att);
        Id xn = tape.layernorm(x1, P(pre + "ln_ffn.gain"), P(pre + "ln_ffn.bias"));
        Id hmid = tape.gelu(tape.add_rowvec(tape.matmul(xn, P(pre + "ffn.w1")), P(pre + "ffn.b1")));
        Id ffn = tape.add_rowvec(tape.matmul(hmid, P(pre + "ffn.w2")), P(pre + "ffn.b2"));
        return tape.add(x1, ffn);
    };

    Id pos = P("embed.pos");
    Id logits;
    if (cfg.arch == Arch::crossmpt) {
        Id M = tape.scale_rows(tape.tile_rows(tape.slice_rows(pos, 0, n), batch), magnitudes);
        Id S = tape.scale_rows(tape.tile_rows(tape.slice_rows(pos, n, m), batch), syndromes);
        for (int l = 0; l < cfg.layers; ++l) {
            M = block(M, S, masks.m2s, n, l, 0);
            S = block(S, M, masks.s2m, m, l, 1);
        }
        // Output head on the concatenated sequence. The two streams stay
        // stacked by sample, so the final norm and the per-position fc1 are
        // applied to each stream and fc2 is split by its row blocks; this is
        // the concatenated product, just computed without the shuffle.
        Id Mn = tape.layernorm(M, P("head.ln.gain"), P("head.ln.bias"));
        Id Sn = tape.layernorm(S, P("head.ln.gain"), P("head.ln.bias"));
        Id m1 = tape.add_rowvec(tape.matmul(Mn, P("head.fc1.w")), P("head.fc1.b"));
        Id s1 = tape.add_rowvec(tape.matmul(Sn, P("head.fc1.w")), P("head.fc1.b"));
        Id mrow = tape.reshape(m1, batch, n);
        Id srow = tape.reshape(s1, batch, m);
        Id w2m = tape.slice_rows(P("head.fc2.w"), 0, n);
        Id w2s = tape.slice_rows(P("head.fc2.w"), n, m);
        logits = tape.add_rowvec(tape.add(tape.matmul(mrow, w2m), tape.matmul(srow, w2s)),
                                 P("head.fc2.b"));
    } else {
        // One token sequence per sample: n magnitude tokens then m syndrome
        // tokens, scaled by the matching channel value.
        std::vector<T> coeff(static_cast<size_t>(batch) * L);
        for (int b = 0; b < batch; ++b) {
            for (int i = 0; i < n; ++i)
                coeff[static_cast<size_t>(b) * L + i] = magnitudes[static_cast<size_t>(b) * n + i];
            for (int j = 0; j < m; ++j)
                coeff[static_cast<size_t>(b) * L + n + j] =
                    syndromes[static_cast<size_t>(b) * m + j];
        }
        Id X = tape.scale_rows(tape.tile_rows(pos, batch), coeff);
        for (int l = 0; l < cfg.layers; ++l) X = block(X, X, masks.self, L, l, 0);
        Id Xn = tape.layernorm(X, P("head.ln.gain"), P("head.ln.bias"));
        Id x1 = tape.add_rowvec(tape.matmul(Xn, P("head.fc1.w")), P("head.fc1.b"));
        Id xrow = tape.reshape(x1, batch, L);
        logits = tape.add_rowvec(tape.matmul(xrow, P("head.fc2.w")), P("head.fc2.b"));
    }
    g.logits = logits;
    return g;
}

// Syndrome bits mapped to embedding coefficients: bipolar sends 0 to +1 and
// 1 to -1; the literal variant keeps 0/1, which zeroes satisfied check
// tokens and is only kept for comparison runs.
template <class T>
std::vector<T> embed_syndrome(const ModelConfig& cfg, const std::vector<std::uint8_t>& bits) {
    std::vector<T> out(bits.size());
    for (size_t i = 0; i < bits.size(); ++i)
        out[i] = cfg.bipolar_syndrome ? (bits[i] ? T(-1) : T(1)) : T(bits[i]);
    return out;
}

// ---- float-path helpers (implemented in model.cpp) ----

struct NnBatchResult {
    std::vector<HardWord> x_hat;  // one estimate per received word
    std::vector<float> logits;    // batch x n, row major
};

// Runs the decoder on a batch. The bit estimate is the hard decision on y
// with the positions where the network fired (logit > 0) flipped back.
NnBatchResult nn_decode_batch(const ModelParams& params, const ModelMasks& masks,
                              const BitMatrix& H, const std::vector<ReceivedWord>& batch);

// Checkpoints carry the config, every model tensor and optional extra
// tensors (optimizer state under an "opt." prefix). Binary, little endian,
// written to a temp file and renamed so readers never see a torn file.
struct CheckpointData {
    ModelConfig cfg;
    std::vector<NamedTensor<float>> model;
    std::vector<NamedTensor<float>> extras;
};

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const std::vector<NamedTensor<float>>& extras = {});
CheckpointData load_checkpoint(const std::string& path);

// Validates names and shapes against the canonical layout for the stored
// config before handing the tensors back as a parameter set.
ModelParams checkpoint_params(const CheckpointData& data);

// Head-averaged attention probabilities for one sample of the batch a graph
// ran on, grouped [layer][block]. CrossMPT yields two blocks per layer
// (magnitude queries, then syndrome queries); the self attention decoder
// yields one.
struct ScoreMatrix {
    int rows = 0, cols = 0;
    std::vector<float> v;
};
std::vector<std::vector<ScoreMatrix>> collect_scores(const Tape<float>& tape,
                                                     const ModelGraph<float>& graph, int batch,
                                                     int sample);

} // namespace eccw
