#pragma once

// Monte-Carlo error-rate estimation and operation-count reporting. Frames
// are generated in fixed chunks of 64 whose content depends only on (seed,
// snr index, chunk index); chunks may be decoded by any number of workers
// but are folded strictly in chunk order, so results are byte-identical for
// any worker count.

#include "eccw/channel.hpp"
#include "eccw/classical.hpp"
#include "eccw/code.hpp"
#include "eccw/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace eccw {

enum class ChannelKind { awgn, rayleigh };

struct EvalConfig {
    std::vector<double> snrs_db;
    long long min_frame_errors = 500;   // stop a point once reached (at a chunk boundary)
    long long max_frames = 10'000'000;  // hard cap per point
    std::uint64_t seed = 1;
    int workers = 1;
    ChannelKind channel = ChannelKind::awgn;
    bool zero_codeword = false;  // transmit the zero word instead of random codewords
};

struct SnrPoint {
    double ebno_db = 0.0;
    double sigma = 0.0;
    long long frames = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    double ber = 0.0;  // when bit_errors is 0 this is the resolution bound 1/(frames*n)
    double fer = 0.0;
    double neg_ln_ber = 0.0;

    bool ber_is_bound() const { return bit_errors == 0; }
    bool fer_is_bound() const { return frame_errors == 0; }
};

struct EvalResult {
    std::string code_name;
    std::string decoder;
    std::string channel;
    int n = 0, k = 0;
    std::vector<SnrPoint> points;
};

// Decodes one chunk of received words. Must be safe to call from several
// threads at once.
using ChunkDecoder = std::function<std::vector<HardWord>(const std::vector<ReceivedWord>&)>;

constexpr int kEvalChunkFrames = 64;

EvalResult estimate_ber(const LinearCode& code, const ChunkDecoder& decode,
                        const EvalConfig& cfg);

// Named decoder selection for the CLI and tests.
enum class DecoderKind { nn, bp, ml, hard };

struct DecoderSpec {
    DecoderKind kind = DecoderKind::hard;
    // nn
    const ModelParams* params = nullptr;
    const ModelMasks* masks = nullptr;
    // bp
    BpConfig bp;
};

std::string decoder_name(const DecoderSpec& spec);

EvalResult evaluate(const LinearCode& code, const DecoderSpec& spec, const EvalConfig& cfg);

// CSV rendering: one row per SNR point, fixed formats, markers "<x" for a
// bit-error free point's rate column and ">x" for its -ln column.
std::string eval_csv(const EvalResult& result);
void write_eval_csv(const std::string& path, const EvalResult& result);

// Multiply-accumulate counting at 2 flops per mac, elementwise work ignored.
// The per-layer numbers cover one attention module of one decoder layer.
// "dense" uses the nominal token count 2n-k (k from the rank of H) and full
// query/key grids; "masked" uses H exactly as loaded, so redundant parity
// rows enlarge the sequence while the mask prunes the grid.
struct FlopsReport {
    Arch arch = Arch::crossmpt;
    int n = 0, k = 0, dim = 0, layers = 0;
    long long per_layer_dense = 0;
    long long per_layer_masked = 0;
    long long full_forward = 0;  // whole net on one word, masked pair counts
};

FlopsReport flops_estimate(Arch arch, const BitMatrix& H, int dim, int layers, int ffn_mult);

std::string flops_csv(const std::vector<FlopsReport>& reports,
                      const std::vector<std::string>& names);

} // namespace eccw
