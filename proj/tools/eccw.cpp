// Command line front end: code inspection, mask statistics, operation
// counts, training, Monte-Carlo evaluation and attention dumps.
//
// Exit codes: 0 success, 1 bad input (arguments, files, shapes), 2 internal
// failure.

#include "CLI11.hpp"

#include "eccw/channel.hpp"
#include "eccw/classical.hpp"
#include "eccw/code.hpp"
#include "eccw/eval.hpp"
#include "eccw/io.hpp"
#include "eccw/masks.hpp"
#include "eccw/model.hpp"
#include "eccw/train.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace eccw;

namespace {

// Relative paths that do not resolve from the working directory fall back to
// $ECCW_PCM_DIR, so canned codes can live in one place.
std::string resolve_pcm(const std::string& path) {
    if (fs::exists(path)) return path;
    if (fs::path(path).is_relative()) {
        if (const char* dir = std::getenv("ECCW_PCM_DIR")) {
            fs::path alt = fs::path(dir) / path;
            if (fs::exists(alt)) return alt.string();
        }
    }
    throw CodeError("parity check file not found: " + path);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::fwrite(content.data(), 1, content.size(), stdout);
    else
        write_file_atomic(out_path, content);
}

struct CodeInfoArgs {
    std::vector<std::string> paths;
};

void run_code_info(const CodeInfoArgs& a) {
    for (const auto& p : a.paths) {
        const std::string path = resolve_pcm(p);
        BitMatrix H = load_pcm(path);
        const int rank = gf2_rank(H);
        int rmin = H.cols(), rmax = 0, cmin = H.rows(), cmax = 0;
        for (int r = 0; r < H.rows(); ++r) {
            int w = H.row_weight(r);
            rmin = std::min(rmin, w);
            rmax = std::max(rmax, w);
        }
        for (int c = 0; c < H.cols(); ++c) {
            int w = H.col_weight(c);
            cmin = std::min(cmin, w);
            cmax = std::max(cmax, w);
        }
        std::printf("%s: n=%d rows=%d rank=%d k=%d ones=%ld\n", stem_of(path).c_str(), H.cols(),
                    H.rows(), rank, H.cols() - rank, H.ones());
        std::printf("  row weight %d..%d, column weight %d..%d\n", rmin, rmax, cmin, cmax);
        if (rank < H.rows())
            std::printf("  %d redundant rows; ingestion needs --drop-redundant\n",
                        H.rows() - rank);
    }
}

struct MaskStatsArgs {
    std::vector<std::string> paths;
    std::string out;
};

void run_mask_stats(const MaskStatsArgs& a) {
    std::string csv = "code,n,k,rows,rho1_pct,rho2_pct,mm,ms,sm,ss\n";
    char buf[256];
    for (const auto& p : a.paths) {
        const std::string path = resolve_pcm(p);
        BitMatrix H = load_pcm(path);
        const int n = H.cols(), rows = H.rows();
        const int k = n - gf2_rank(H);
        AttentionMask self = build_ecct_mask(H, false);
        EcctMaskBreakdown parts = ecct_mask_breakdown(self, n);
        const double rho1 = 100.0 * mask_density(self);
        const double rho2 = 100.0 * static_cast<double>(H.ones()) /
                            (static_cast<double>(n) * rows);
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.2f,%.2f,%ld,%ld,%ld,%ld\n",
                      stem_of(path).c_str(), n, k, rows, rho1, rho2, parts.mm, parts.ms,
                      parts.sm, parts.ss);
        csv += buf;
    }
    emit(a.out, csv);
}

struct FlopsArgs {
    std::vector<std::string> paths;
    int dim = 128;
    int layers = 6;
    int ffn_mult = 4;
    std::string out;
};

void run_flops(const FlopsArgs& a) {
    std::vector<FlopsReport> reports;
    std::vector<std::string> names;
    for (const auto& p : a.paths) {
        const std::string path = resolve_pcm(p);
        BitMatrix H = load_pcm(path);
        for (Arch arch : {Arch::crossmpt, Arch::ecct}) {
            reports.push_back(flops_estimate(arch, H, a.dim, a.layers, a.ffn_mult));
            names.push_back(stem_of(path));
        }
    }
    emit(a.out, flops_csv(reports, names));
}

struct TrainArgs {
    std::string pcm;
    bool drop_redundant = false;
    std::string arch = "crossmpt";
    int layers = 6, dim = 128, heads = 8, ffn_mult = 4;
    bool literal_syndrome = false;
    bool ablate_self_blocks = false;
    TrainConfig cfg;
    bool random_codewords = false;
    bool continuous_ebno = false;
};

void run_train(TrainArgs& a) {
    LinearCode code = load_code(resolve_pcm(a.pcm),
                                a.drop_redundant ? RedundantRows::drop : RedundantRows::reject);
    a.cfg.model.arch = arch_from_name(a.arch);
    a.cfg.model.layers = a.layers;
    a.cfg.model.dim = a.dim;
    a.cfg.model.heads = a.heads;
    a.cfg.model.ffn_mult = a.ffn_mult;
    a.cfg.model.bipolar_syndrome = !a.literal_syndrome;
    a.cfg.model.ablate_self_blocks = a.ablate_self_blocks;
    a.cfg.zero_codeword = !a.random_codewords;
    a.cfg.continuous_ebno = a.continuous_ebno;
    std::printf("training %s on %s: n=%d k=%d, %d layers, dim %d, %d epochs x %d batches x %d\n",
                a.arch.c_str(), code.name.c_str(), code.n, code.k, a.layers, a.dim, a.cfg.epochs,
                a.cfg.batches_per_epoch, a.cfg.batch_size);
    run_training(code, a.cfg, [&](const TrainRecord& r) {
        std::printf("epoch %4d/%d  loss %10.4f  lr %.4g\n", r.epoch, a.cfg.epochs,
                    static_cast<double>(r.mean_loss), r.lr);
        std::fflush(stdout);
    });
}

struct EvalArgs {
    std::string pcm;
    bool drop_redundant = false;
    std::string decoder = "hard";
    std::string model_path;
    EvalConfig cfg;
    std::string channel = "awgn";
    int bp_iters = 20;
    std::string out;
};

void run_eval(EvalArgs& a) {
    LinearCode code = load_code(resolve_pcm(a.pcm),
                                a.drop_redundant ? RedundantRows::drop : RedundantRows::reject);
    if (a.channel == "awgn")
        a.cfg.channel = ChannelKind::awgn;
    else if (a.channel == "rayleigh")
        a.cfg.channel = ChannelKind::rayleigh;
    else
        throw CodeError("unknown channel '" + a.channel + "'");

    DecoderSpec spec;
    ModelParams params;
    ModelMasks masks;
    if (a.decoder == "hard") {
        spec.kind = DecoderKind::hard;
    } else if (a.decoder == "ml") {
        spec.kind = DecoderKind::ml;
    } else if (a.decoder == "bp" || a.decoder == "ms") {
        spec.kind = DecoderKind::bp;
        spec.bp.max_iterations = a.bp_iters;
        spec.bp.variant = a.decoder == "ms" ? BpVariant::min_sum : BpVariant::sum_product;
    } else if (a.decoder == "nn") {
        if (a.model_path.empty()) throw CodeError("--decoder nn needs --model");
        spec.kind = DecoderKind::nn;
        params = checkpoint_params(load_checkpoint(a.model_path));
        masks = prepare_masks<float>(params.cfg, code.H);
        spec.params = &params;
        spec.masks = &masks;
    } else {
        throw CodeError("unknown decoder '" + a.decoder + "' (nn, bp, ms, ml, hard)");
    }

    EvalResult r = evaluate(code, spec, a.cfg);
    emit(a.out, eval_csv(r));
}

struct AttnArgs {
    std::string pcm;
    bool drop_redundant = false;
    std::string model_path;
    std::vector<int> flips;
    bool has_snr = false;  // noiseless probe unless --snr given
    double snr_db = 0.0;
    std::uint64_t seed = 1;
    bool mean_layers = false;
    bool col_sum = false;
    std::string out;
};

void run_attn_dump(AttnArgs& a) {
    LinearCode code = load_code(resolve_pcm(a.pcm),
                                a.drop_redundant ? RedundantRows::drop : RedundantRows::reject);
    ModelParams params = checkpoint_params(load_checkpoint(a.model_path));
    if (params.cfg.n != code.n || params.cfg.checks != code.H.rows())
        throw ModelError("model was trained for a different code shape");
    ModelMasks masks = prepare_masks<float>(params.cfg, code.H);

    HardWord x(code.n, 0);
    for (int i : a.flips) {
        if (i < 0 || i >= code.n) throw CodeError("--flip index out of range");
        x[i] ^= 1;
    }
    std::vector<double> y = modulate_bpsk(x);
    if (a.has_snr) {
        Rng rng(mix_seed(a.seed, {0x61747464}));
        const double sigma = ebno_to_sigma(a.snr_db, static_cast<double>(code.k) / code.n);
        y = transmit_awgn(y, sigma, rng).y;
    }

    HardWord hard = hard_decision(y);
    HardWord syn = syndrome(code.H, hard);
    std::vector<float> mag(code.n);
    for (int i = 0; i < code.n; ++i) mag[i] = static_cast<float>(std::abs(y[i]));
    std::vector<float> syn_emb = embed_syndrome<float>(params.cfg, syn);

    Tape<float> tape;
    ModelGraph<float> g = build_forward(tape, params, masks, mag, syn_emb, 1, false);
    auto scores = collect_scores(tape, g, 1, 0);

    if (a.mean_layers && scores.size() > 1) {
        // Average layer by layer into layer slot 0, block-wise.
        for (size_t l = 1; l < scores.size(); ++l)
            for (size_t b = 0; b < scores[l].size(); ++b)
                for (size_t i = 0; i < scores[l][b].v.size(); ++i)
                    scores[0][b].v[i] += scores[l][b].v[i];
        for (auto& blk : scores[0])
            for (auto& v : blk.v) v /= static_cast<float>(scores.size());
        scores.resize(1);
    }

    std::string csv = a.col_sum ? "layer,block,col,weight\n" : "layer,block,row,col,weight\n";
    char buf[96];
    for (size_t l = 0; l < scores.size(); ++l) {
        const char* lname = a.mean_layers ? "mean" : nullptr;
        for (size_t b = 0; b < scores[l].size(); ++b) {
            const ScoreMatrix& m = scores[l][b];
            if (a.col_sum) {
                for (int c = 0; c < m.cols; ++c) {
                    double s = 0.0;
                    for (int r = 0; r < m.rows; ++r)
                        s += m.v[static_cast<size_t>(r) * m.cols + c];
                    if (lname)
                        std::snprintf(buf, sizeof(buf), "%s,%zu,%d,%.6e\n", lname, b, c, s);
                    else
                        std::snprintf(buf, sizeof(buf), "%zu,%zu,%d,%.6e\n", l, b, c, s);
                    csv += buf;
                }
            } else {
                for (int r = 0; r < m.rows; ++r)
                    for (int c = 0; c < m.cols; ++c) {
                        const double v = m.v[static_cast<size_t>(r) * m.cols + c];
                        if (lname)
                            std::snprintf(buf, sizeof(buf), "%s,%zu,%d,%d,%.6e\n", lname, b, r, c,
                                          v);
                        else
                            std::snprintf(buf, sizeof(buf), "%zu,%zu,%d,%d,%.6e\n", l, b, r, c, v);
                        csv += buf;
                    }
            }
        }
    }
    emit(a.out, csv);

    const auto& logits = tape.value(g.logits);
    HardWord est = hard;
    for (int i = 0; i < code.n; ++i)
        if (logits[i] > 0.0f) est[i] ^= 1;
    int syn_weight = 0;
    for (auto b : syn) syn_weight += b;
    std::fprintf(stderr, "probe: %zu flipped bits, syndrome weight %d, estimate %s\n",
                 a.flips.size(), syn_weight,
                 is_zero(syndrome(code.H, est)) ? "clears the syndrome" : "leaves a syndrome");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"error correcting code workbench"};
    app.require_subcommand(1);

    CodeInfoArgs ci;
    auto* c_info = app.add_subcommand("code-info", "inspect a parity check matrix");
    c_info->add_option("pcm", ci.paths, "alist or 0/1 text files")->required();

    MaskStatsArgs ms;
    auto* c_mask = app.add_subcommand("mask-stats", "attention mask densities per code");
    c_mask->add_option("pcm", ms.paths, "alist or 0/1 text files")->required();
    c_mask->add_option("--out", ms.out, "write CSV here instead of stdout");

    FlopsArgs fl;
    auto* c_flops = app.add_subcommand("flops", "attention operation counts per code");
    c_flops->add_option("pcm", fl.paths, "alist or 0/1 text files")->required();
    c_flops->add_option("--dim", fl.dim, "embedding dimension")->capture_default_str();
    c_flops->add_option("--layers", fl.layers, "decoder layers")->capture_default_str();
    c_flops->add_option("--ffn-mult", fl.ffn_mult, "ffn width multiplier")->capture_default_str();
    c_flops->add_option("--out", fl.out, "write CSV here instead of stdout");

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "train a decoder");
    c_train->add_option("pcm", tr.pcm, "parity check file")->required();
    c_train->add_flag("--drop-redundant", tr.drop_redundant, "drop linearly dependent rows");
    c_train->add_option("--arch", tr.arch, "crossmpt or ecct")->capture_default_str();
    c_train->add_option("--layers", tr.layers)->capture_default_str();
    c_train->add_option("--dim", tr.dim)->capture_default_str();
    c_train->add_option("--heads", tr.heads)->capture_default_str();
    c_train->add_option("--ffn-mult", tr.ffn_mult)->capture_default_str();
    c_train->add_flag("--literal-syndrome", tr.literal_syndrome,
                      "embed syndrome bits as 0/1 instead of +1/-1");
    c_train->add_flag("--ablate-self-blocks", tr.ablate_self_blocks,
                      "ecct: keep only the diagonal of the self blocks");
    c_train->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
    c_train->add_option("--batches", tr.cfg.batches_per_epoch)->capture_default_str();
    c_train->add_option("--batch-size", tr.cfg.batch_size)->capture_default_str();
    c_train->add_option("--lr-start", tr.cfg.lr_start)->capture_default_str();
    c_train->add_option("--lr-end", tr.cfg.lr_end)->capture_default_str();
    c_train->add_option("--ebno-lo", tr.cfg.ebno_lo)->capture_default_str();
    c_train->add_option("--ebno-hi", tr.cfg.ebno_hi)->capture_default_str();
    c_train->add_flag("--continuous-ebno", tr.continuous_ebno,
                      "sample Eb/N0 from the continuous interval, not the integer grid");
    c_train->add_flag("--random-codewords", tr.random_codewords,
                      "transmit random codewords instead of the zero word");
    c_train->add_option("--seed", tr.cfg.seed)->capture_default_str();
    c_train->add_option("--checkpoint", tr.cfg.checkpoint_path, "checkpoint file to write");
    c_train->add_option("--checkpoint-every", tr.cfg.checkpoint_every, "epochs between writes")
        ->capture_default_str();
    c_train->add_option("--loss-csv", tr.cfg.loss_csv, "training curve CSV");
    c_train->add_option("--resume", tr.cfg.resume_from, "checkpoint to continue from");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Monte-Carlo error rates");
    c_eval->add_option("pcm", ev.pcm, "parity check file")->required();
    c_eval->add_flag("--drop-redundant", ev.drop_redundant, "drop linearly dependent rows");
    c_eval->add_option("--decoder", ev.decoder, "nn, bp, ms, ml or hard")->capture_default_str();
    c_eval->add_option("--model", ev.model_path, "checkpoint for --decoder nn");
    c_eval->add_option("--snr", ev.cfg.snrs_db, "Eb/N0 points in dB")->required();
    c_eval->add_option("--min-frame-errors", ev.cfg.min_frame_errors)->capture_default_str();
    c_eval->add_option("--max-frames", ev.cfg.max_frames)->capture_default_str();
    c_eval->add_option("--seed", ev.cfg.seed)->capture_default_str();
    c_eval->add_option("--workers", ev.cfg.workers)->capture_default_str();
    c_eval->add_option("--channel", ev.channel, "awgn or rayleigh")->capture_default_str();
    c_eval->add_option("--bp-iters", ev.bp_iters)->capture_default_str();
    c_eval->add_flag("--zero-codeword", ev.cfg.zero_codeword,
                     "transmit the zero word instead of random codewords");
    c_eval->add_option("--out", ev.out, "write CSV here instead of stdout");

    AttnArgs at;
    auto* c_attn = app.add_subcommand("attn-dump", "attention maps for a probe word");
    c_attn->add_option("pcm", at.pcm, "parity check file")->required();
    c_attn->add_flag("--drop-redundant", at.drop_redundant, "drop linearly dependent rows");
    c_attn->add_option("--model", at.model_path, "checkpoint to probe")->required();
    c_attn->add_option("--flip", at.flips, "bit positions to corrupt in the zero word");
    auto* attn_snr = c_attn->add_option("--snr", at.snr_db, "add channel noise at this Eb/N0 (dB)");
    c_attn->add_option("--seed", at.seed)->capture_default_str();
    c_attn->add_flag("--mean-layers", at.mean_layers, "average the maps over layers");
    c_attn->add_flag("--col-sum", at.col_sum, "emit per-key column sums instead of full maps");
    c_attn->add_option("--out", at.out, "write CSV here instead of stdout");

    c_info->callback([&] { run_code_info(ci); });
    c_mask->callback([&] { run_mask_stats(ms); });
    c_flops->callback([&] { run_flops(fl); });
    c_train->callback([&] { run_train(tr); });
    c_eval->callback([&] {
        ev.bp_iters = std::max(ev.bp_iters, 1);
        run_eval(ev);
    });
    c_attn->callback([&] {
        at.has_snr = attn_snr->count() > 0;
        run_attn_dump(at);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const eccw::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const CodeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ModelError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const TrainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
    return 0;
}
