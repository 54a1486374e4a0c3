#include "eccw/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace eccw {

std::string arch_name(Arch a) { return a == Arch::crossmpt ? "crossmpt" : "ecct"; }

Arch arch_from_name(const std::string& s) {
    if (s == "crossmpt") return Arch::crossmpt;
    if (s == "ecct") return Arch::ecct;
    throw ModelError("unknown architecture '" + s + "' (expected crossmpt or ecct)");
}

long long param_count(const ModelConfig& cfg) {
    const long long d = cfg.dim, f = static_cast<long long>(cfg.ffn_mult) * cfg.dim;
    const long long L = cfg.seq_len(), n = cfg.n;
    const long long attn = 4 * (d * d + d);
    const long long ffn = d * f + f + f * d + d;
    const long long norms = 4 * d;  // two layer norms, gain and bias each
    const long long head = 2 * d + (d + 1) + (L * n + n);
    return L * d + cfg.layers * (attn + ffn + norms) + head;
}

NnBatchResult nn_decode_batch(const ModelParams& params, const ModelMasks& masks,
                              const BitMatrix& H, const std::vector<ReceivedWord>& batch) {
    const ModelConfig& cfg = params.cfg;
    const int B = static_cast<int>(batch.size());
    const int n = cfg.n, m = cfg.checks;
    std::vector<float> mag(static_cast<size_t>(B) * n);
    std::vector<std::uint8_t> syn_bits(static_cast<size_t>(B) * m);
    std::vector<HardWord> hard(B);
    for (int b = 0; b < B; ++b) {
        const auto& y = batch[b].y;
        if (static_cast<int>(y.size()) != n) throw ModelError("received word length mismatch");
        hard[b] = hard_decision(y);
        HardWord s = syndrome(H, hard[b]);
        for (int i = 0; i < n; ++i)
            mag[static_cast<size_t>(b) * n + i] = static_cast<float>(std::abs(y[i]));
        for (int j = 0; j < m; ++j) syn_bits[static_cast<size_t>(b) * m + j] = s[j];
    }
    std::vector<float> syn = embed_syndrome<float>(cfg, syn_bits);

    Tape<float> tape;
    ModelGraph<float> g = build_forward(tape, params, masks, mag, syn, B, false);
    const std::vector<float>& logits = tape.value(g.logits);

    NnBatchResult out;
    out.logits = logits;
    out.x_hat.resize(B);
    for (int b = 0; b < B; ++b) {
        HardWord x = hard[b];
        for (int i = 0; i < n; ++i)
            if (logits[static_cast<size_t>(b) * n + i] > 0.0f) x[i] ^= 1;
        out.x_hat[b] = std::move(x);
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'E', 'C', 'W', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw ModelError("checkpoint truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_tensor(std::ostream& os, const NamedTensor<float>& t) {
    put_u32(os, static_cast<std::uint32_t>(t.name.size()));
    os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u32(os, static_cast<std::uint32_t>(t.rows));
    put_u32(os, static_cast<std::uint32_t>(t.cols));
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(t.v.data()),
             static_cast<std::streamsize>(t.v.size() * 4));
}

NamedTensor<float> get_tensor(std::istream& is) {
    NamedTensor<float> t;
    std::uint32_t len = get_u32(is);
    if (len > 4096) throw ModelError("checkpoint tensor name implausibly long");
    t.name.resize(len);
    is.read(t.name.data(), len);
    t.rows = static_cast<int>(get_u32(is));
    t.cols = static_cast<int>(get_u32(is));
    if (t.rows <= 0 || t.cols <= 0 || static_cast<long long>(t.rows) * t.cols > (1LL << 28))
        throw ModelError("checkpoint tensor shape out of range");
    t.v.resize(static_cast<size_t>(t.rows) * t.cols);
    is.read(reinterpret_cast<char*>(t.v.data()), static_cast<std::streamsize>(t.v.size() * 4));
    if (!is) throw ModelError("checkpoint truncated");
    return t;
}

} // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const std::vector<NamedTensor<float>>& extras) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ModelError("cannot open " + tmp + " for writing");
        os.write(kMagic, 4);
        put_u32(os, kVersion);
        const ModelConfig& c = params.cfg;
        put_u32(os, c.arch == Arch::crossmpt ? 0 : 1);
        put_u32(os, static_cast<std::uint32_t>(c.n));
        put_u32(os, static_cast<std::uint32_t>(c.checks));
        put_u32(os, static_cast<std::uint32_t>(c.layers));
        put_u32(os, static_cast<std::uint32_t>(c.dim));
        put_u32(os, static_cast<std::uint32_t>(c.heads));
        put_u32(os, static_cast<std::uint32_t>(c.ffn_mult));
        std::uint32_t flags = (c.bipolar_syndrome ? 1u : 0u) | (c.ablate_self_blocks ? 2u : 0u);
        put_u32(os, flags);
        put_u32(os, static_cast<std::uint32_t>(params.tensors.size() + extras.size()));
        for (const auto& t : params.tensors) put_tensor(os, t);
        for (const auto& t : extras) put_tensor(os, t);
        os.flush();
        if (!os) throw ModelError("write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ModelError("cannot move checkpoint into place at " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ModelError("cannot open checkpoint " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw ModelError(path + " is not a checkpoint file");
    if (get_u32(is) != kVersion) throw ModelError("unsupported checkpoint version in " + path);
    CheckpointData out;
    out.cfg.arch = get_u32(is) == 0 ? Arch::crossmpt : Arch::ecct;
    out.cfg.n = static_cast<int>(get_u32(is));
    out.cfg.checks = static_cast<int>(get_u32(is));
    out.cfg.layers = static_cast<int>(get_u32(is));
    out.cfg.dim = static_cast<int>(get_u32(is));
    out.cfg.heads = static_cast<int>(get_u32(is));
    out.cfg.ffn_mult = static_cast<int>(get_u32(is));
    std::uint32_t flags = get_u32(is);
    out.cfg.bipolar_syndrome = (flags & 1u) != 0;
    out.cfg.ablate_self_blocks = (flags & 2u) != 0;
    std::uint32_t count = get_u32(is);
    for (std::uint32_t i = 0; i < count; ++i) {
        NamedTensor<float> t = get_tensor(is);
        if (t.name.rfind("opt.", 0) == 0)
            out.extras.push_back(std::move(t));
        else
            out.model.push_back(std::move(t));
    }
    return out;
}

ModelParams checkpoint_params(const CheckpointData& data) {
    ModelParams p = make_params<float>(data.cfg);
    if (data.model.size() != p.tensors.size())
        throw ModelError("checkpoint holds " + std::to_string(data.model.size()) +
                         " model tensors, layout expects " + std::to_string(p.tensors.size()));
    for (size_t i = 0; i < p.tensors.size(); ++i) {
        const auto& have = data.model[i];
        auto& want = p.tensors[i];
        if (have.name != want.name || have.rows != want.rows || have.cols != want.cols)
            throw ModelError("checkpoint tensor " + have.name + " does not match layout slot " +
                             want.name);
        want.v = have.v;
    }
    return p;
}

std::vector<std::vector<ScoreMatrix>> collect_scores(const Tape<float>& tape,
                                                     const ModelGraph<float>& graph, int batch,
                                                     int sample) {
    std::vector<std::vector<ScoreMatrix>> out;
    for (const auto& layer : graph.scores) {
        std::vector<ScoreMatrix> blocks;
        for (const auto& heads : layer) {
            ScoreMatrix m;
            if (heads.empty()) {
                blocks.push_back(m);
                continue;
            }
            const int stacked_rows = tape.rows(heads[0]);
            m.rows = stacked_rows / batch;
            m.cols = tape.cols(heads[0]);
            m.v.assign(static_cast<size_t>(m.rows) * m.cols, 0.0f);
            const size_t off = static_cast<size_t>(sample) * m.rows * m.cols;
            for (auto id : heads) {
                const auto& v = tape.value(id);
                for (size_t i = 0; i < m.v.size(); ++i) m.v[i] += v[off + i];
            }
            for (auto& x : m.v) x /= static_cast<float>(heads.size());
            blocks.push_back(std::move(m));
        }
        out.push_back(std::move(blocks));
    }
    return out;
}

} // namespace eccw
