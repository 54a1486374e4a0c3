#include "eccw/eval.hpp"

#include "eccw/io.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

namespace eccw {

namespace {

constexpr std::uint64_t kEvalTag = 0x6576616c;

struct ChunkStats {
    long long frames = 0, bit_errors = 0, frame_errors = 0;
};

ChunkStats run_chunk(const LinearCode& code, const ChunkDecoder& decode, const EvalConfig& cfg,
                     std::uint64_t snr_idx, long long chunk_idx, double sigma, int frames) {
    Rng rng(mix_seed(cfg.seed, {kEvalTag, snr_idx, static_cast<std::uint64_t>(chunk_idx)}));
    // Messages draw from their own stream and the codeword enters as sign
    // flips of an all-plus transmission. Flipping the signs of symmetric
    // noise leaves its law unchanged, so this is a faithful transmission of
    // the codeword while keeping the noise stream independent of it.
    Rng msg_rng(mix_seed(cfg.seed, {kEvalTag, snr_idx, static_cast<std::uint64_t>(chunk_idx),
                                    0x6d7367}));
    const std::vector<double> ones(code.n, 1.0);
    std::vector<HardWord> sent(frames);
    std::vector<ReceivedWord> rx(frames);
    for (int f = 0; f < frames; ++f) {
        rx[f] = cfg.channel == ChannelKind::awgn ? transmit_awgn(ones, sigma, rng)
                                                 : transmit_rayleigh(ones, sigma, rng);
        HardWord x(code.n, 0);
        if (!cfg.zero_codeword) {
            HardWord msg(code.k);
            for (int i = 0; i < code.k; ++i) msg[i] = uniform01(msg_rng) < 0.5 ? 0 : 1;
            x = encode(code, msg);
            for (int i = 0; i < code.n; ++i)
                if (x[i]) rx[f].y[i] = -rx[f].y[i];
        }
        sent[f] = std::move(x);
    }
    std::vector<HardWord> est = decode(rx);

    ChunkStats s;
    s.frames = frames;
    for (int f = 0; f < frames; ++f) {
        int errs = 0;
        for (int i = 0; i < code.n; ++i) errs += est[f][i] != sent[f][i];
        s.bit_errors += errs;
        s.frame_errors += errs > 0;
    }
    return s;
}

} // namespace

EvalResult estimate_ber(const LinearCode& code, const ChunkDecoder& decode,
                        const EvalConfig& cfg) {
    EvalResult out;
    out.code_name = code.name;
    out.n = code.n;
    out.k = code.k;
    out.channel = cfg.channel == ChannelKind::awgn ? "awgn" : "rayleigh";
    const double rate = static_cast<double>(code.k) / code.n;
    const int workers = std::max(cfg.workers, 1);

    for (size_t si = 0; si < cfg.snrs_db.size(); ++si) {
        const double sigma = ebno_to_sigma(cfg.snrs_db[si], rate);
        const long long max_chunks =
            (cfg.max_frames + kEvalChunkFrames - 1) / kEvalChunkFrames;

        std::atomic<long long> next{0};
        std::atomic<bool> stop{false};
        std::map<long long, ChunkStats> ready;
        std::mutex mu;
        std::condition_variable cv;

        auto work = [&] {
            while (!stop.load(std::memory_order_relaxed)) {
                const long long id = next.fetch_add(1);
                if (id >= max_chunks) break;
                const int frames = static_cast<int>(
                    std::min<long long>(kEvalChunkFrames,
                                        cfg.max_frames - id * kEvalChunkFrames));
                ChunkStats s = run_chunk(code, decode, cfg, si, id, sigma, frames);
                {
                    std::lock_guard<std::mutex> lock(mu);
                    ready.emplace(id, s);
                }
                cv.notify_all();
            }
        };

        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);

        // The fold consumes chunks in index order regardless of completion
        // order; the stopping decision therefore depends only on the chunk
        // contents, never on scheduling.
        SnrPoint point;
        point.ebno_db = cfg.snrs_db[si];
        point.sigma = sigma;
        for (long long expect = 0; expect < max_chunks; ++expect) {
            ChunkStats s;
            {
                std::unique_lock<std::mutex> lock(mu);
                cv.wait(lock, [&] { return ready.count(expect) > 0; });
                s = ready[expect];
                ready.erase(expect);
            }
            point.frames += s.frames;
            point.bit_errors += s.bit_errors;
            point.frame_errors += s.frame_errors;
            if (point.frame_errors >= cfg.min_frame_errors) break;
        }
        stop.store(true);
        for (auto& t : pool) t.join();

        const double bits = static_cast<double>(point.frames) * code.n;
        point.ber = point.bit_errors > 0 ? point.bit_errors / bits : 1.0 / bits;
        point.fer = point.frame_errors > 0
                        ? static_cast<double>(point.frame_errors) / point.frames
                        : 1.0 / static_cast<double>(point.frames);
        point.neg_ln_ber = -std::log(point.ber);
        out.points.push_back(point);
    }
    return out;
}

std::string decoder_name(const DecoderSpec& spec) {
    switch (spec.kind) {
        case DecoderKind::nn: return "nn";
        case DecoderKind::bp: return spec.bp.variant == BpVariant::min_sum ? "ms" : "bp";
        case DecoderKind::ml: return "ml";
        case DecoderKind::hard: return "hard";
    }
    return "?";
}

EvalResult evaluate(const LinearCode& code, const DecoderSpec& spec, const EvalConfig& cfg) {
    // Decoder preconditions are checked here, before any worker thread
    // exists; an exception thrown inside a worker would be unrecoverable.
    if (spec.kind == DecoderKind::ml && code.k > 24)
        throw CodeError("ml decoding enumerates 2^k codewords; k=" + std::to_string(code.k) +
                        " is past the supported limit of 24");
    if (spec.kind == DecoderKind::nn && spec.params &&
        (spec.params->cfg.n != code.n || spec.params->cfg.checks != code.H.rows()))
        throw ModelError("model was trained for a different code shape");
    ChunkDecoder decode;
    TannerGraph graph(code.H);
    switch (spec.kind) {
        case DecoderKind::hard:
            decode = [](const std::vector<ReceivedWord>& rx) {
                std::vector<HardWord> out;
                out.reserve(rx.size());
                for (const auto& r : rx) out.push_back(hard_decision(r.y));
                return out;
            };
            break;
        case DecoderKind::ml:
            decode = [&code](const std::vector<ReceivedWord>& rx) {
                std::vector<HardWord> out;
                out.reserve(rx.size());
                for (const auto& r : rx) out.push_back(ml_decode(code, r.y).x_hat);
                return out;
            };
            break;
        case DecoderKind::bp:
            decode = [graph, bp = spec.bp](const std::vector<ReceivedWord>& rx) {
                std::vector<HardWord> out;
                out.reserve(rx.size());
                for (const auto& r : rx) out.push_back(bp_decode(graph, r, bp).x_hat);
                return out;
            };
            break;
        case DecoderKind::nn:
            if (!spec.params || !spec.masks)
                throw ModelError("nn decoder needs parameters and masks");
            decode = [params = spec.params, masks = spec.masks,
                      H = code.H](const std::vector<ReceivedWord>& rx) {
                return nn_decode_batch(*params, *masks, H, rx).x_hat;
            };
            break;
    }
    EvalResult r = estimate_ber(code, decode, cfg);
    r.decoder = decoder_name(spec);
    return r;
}

std::string eval_csv(const EvalResult& result) {
    std::string out = "snr_db,sigma,frames,bit_errors,frame_errors,ber,fer,neg_ln_ber\n";
    char buf[256];
    for (const auto& p : result.points) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.9g,%lld,%lld,%lld,", p.ebno_db, p.sigma, p.frames,
                      p.bit_errors, p.frame_errors);
        out += buf;
        std::snprintf(buf, sizeof(buf), p.ber_is_bound() ? "<%.6e," : "%.6e,", p.ber);
        out += buf;
        std::snprintf(buf, sizeof(buf), p.fer_is_bound() ? "<%.6e," : "%.6e,", p.fer);
        out += buf;
        std::snprintf(buf, sizeof(buf), p.ber_is_bound() ? ">%.6f\n" : "%.6f\n", p.neg_ln_ber);
        out += buf;
    }
    return out;
}

void write_eval_csv(const std::string& path, const EvalResult& result) {
    write_file_atomic(path, eval_csv(result));
}

FlopsReport flops_estimate(Arch arch, const BitMatrix& H, int dim, int layers, int ffn_mult) {
    FlopsReport r;
    r.arch = arch;
    r.n = H.cols();
    r.k = H.cols() - gf2_rank(H);
    r.dim = dim;
    r.layers = layers;
    const long long d = dim, n = H.cols(), k = r.k;
    const long long L_nom = 2 * n - k;       // nominal sequence, redundant rows removed
    const long long L_act = n + H.rows();    // sequence as the model actually runs
    const long long proj_nom = 8 * d * d * L_nom;
    const long long proj_act = 8 * d * d * L_act;
    if (arch == Arch::crossmpt) {
        r.per_layer_dense = proj_nom + 8 * d * n * (n - k);
        r.per_layer_masked = proj_act + 8 * d * H.ones();
    } else {
        r.per_layer_dense = proj_nom + 4 * d * L_nom * L_nom;
        AttentionMask m = build_ecct_mask(H, false);
        r.per_layer_masked = proj_act + 4 * d * m.unmasked();
    }
    const long long f = static_cast<long long>(ffn_mult) * d;
    const long long ffn = 4 * d * f * L_act;
    const long long head = 2 * d * L_act + 2 * L_act * n;
    r.full_forward = layers * (r.per_layer_masked + ffn) + L_act * d + head;
    return r;
}

std::string flops_csv(const std::vector<FlopsReport>& reports,
                      const std::vector<std::string>& names) {
    std::string out = "code,arch,n,k,dim,layers,per_layer_dense,per_layer_masked,full_forward\n";
    char buf[256];
    for (size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%d,%d,%lld,%lld,%lld\n",
                      names.at(i).c_str(), arch_name(r.arch).c_str(), r.n, r.k, r.dim, r.layers,
                      r.per_layer_dense, r.per_layer_masked, r.full_forward);
        out += buf;
    }
    return out;
}

} // namespace eccw
