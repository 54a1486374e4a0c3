#include "eccw/train.hpp"

#include "eccw/channel.hpp"
#include "eccw/io.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace eccw {

namespace {

constexpr std::uint64_t kBatchTag = 0x62617463;  // keeps batch streams apart from init streams

std::string loss_csv_text(const std::vector<TrainRecord>& records) {
    std::string out = "epoch,mean_loss,lr\n";
    char line[96];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), "%d,%.9g,%.9g\n", r.epoch,
                      static_cast<double>(r.mean_loss), r.lr);
        out += line;
    }
    return out;
}

} // namespace

TrainBatch sample_batch(const LinearCode& code, const ModelConfig& model, const TrainConfig& cfg,
                        int epoch, int batch_idx) {
    const int n = code.n, m = code.H.rows();
    const double rate = static_cast<double>(code.k) / code.n;
    Rng rng(mix_seed(cfg.seed, {kBatchTag, static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(batch_idx)}));

    // Message bits live on their own stream so the noise draws line up with
    // the zero-codeword mode sample for sample.
    Rng msg_rng(mix_seed(cfg.seed, {kBatchTag, static_cast<std::uint64_t>(epoch),
                                    static_cast<std::uint64_t>(batch_idx), 0x6d7367}));

    TrainBatch out;
    out.size = cfg.batch_size;
    out.magnitudes.resize(static_cast<size_t>(cfg.batch_size) * n);
    out.targets.resize(static_cast<size_t>(cfg.batch_size) * n);
    std::vector<std::uint8_t> syn_bits(static_cast<size_t>(cfg.batch_size) * m);

    const std::vector<double> ones(n, 1.0);
    HardWord zero(n, 0);
    for (int s = 0; s < cfg.batch_size; ++s) {
        double u = uniform01(rng);
        double ebno = cfg.continuous_ebno
                          ? cfg.ebno_lo + u * (cfg.ebno_hi - cfg.ebno_lo)
                          : cfg.ebno_lo + std::min(static_cast<int>(u * (cfg.ebno_hi - cfg.ebno_lo + 1)),
                                                   cfg.ebno_hi - cfg.ebno_lo);
        double sigma = ebno_to_sigma(ebno, rate);
        ReceivedWord rx = transmit_awgn(ones, sigma, rng);
        HardWord x = zero;
        if (!cfg.zero_codeword) {
            // The fresh noise times any sign pattern is again white, so
            // flipping the zero-codeword transmission by a random codeword is
            // a faithful transmission of that codeword. It reuses the exact
            // noise draw, which is what makes the two modes comparable.
            HardWord msg(code.k);
            for (int i = 0; i < code.k; ++i) msg[i] = uniform01(msg_rng) < 0.5 ? 0 : 1;
            x = encode(code, msg);
            for (int i = 0; i < n; ++i)
                if (x[i]) rx.y[i] = -rx.y[i];
        }
        HardWord target = noise_target(rx.y, x);
        HardWord hard = hard_decision(rx.y);
        HardWord syn = syndrome(code.H, hard);
        for (int i = 0; i < n; ++i) {
            out.magnitudes[static_cast<size_t>(s) * n + i] = static_cast<float>(std::abs(rx.y[i]));
            out.targets[static_cast<size_t>(s) * n + i] = static_cast<float>(target[i]);
        }
        for (int j = 0; j < m; ++j) syn_bits[static_cast<size_t>(s) * m + j] = syn[j];
    }
    out.syndromes = embed_syndrome<float>(model, syn_bits);
    return out;
}

double batch_loss(const ModelParams& params, const ModelMasks& masks, const TrainBatch& batch) {
    Tape<float> tape;
    ModelGraph<float> g =
        build_forward(tape, params, masks, batch.magnitudes, batch.syndromes, batch.size, false);
    auto loss = tape.mean_all(tape.bce_logits_rowsum(g.logits, batch.targets));
    return tape.value(loss)[0];
}

double lr_at_step(const TrainConfig& cfg, long long step_index) {
    const long long total = static_cast<long long>(cfg.epochs) * cfg.batches_per_epoch;
    if (total <= 1) return cfg.lr_start;
    const double t = static_cast<double>(step_index) / static_cast<double>(total - 1);
    return cfg.lr_end + (cfg.lr_start - cfg.lr_end) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

namespace {

void require_same_config(const ModelConfig& a, const ModelConfig& b) {
    const bool same = a.arch == b.arch && a.n == b.n && a.checks == b.checks &&
                      a.layers == b.layers && a.dim == b.dim && a.heads == b.heads &&
                      a.ffn_mult == b.ffn_mult && a.bipolar_syndrome == b.bipolar_syndrome &&
                      a.ablate_self_blocks == b.ablate_self_blocks;
    if (!same) throw TrainError("resume checkpoint was trained with a different model config");
}

const NamedTensor<float>* find_extra(const std::vector<NamedTensor<float>>& extras,
                                     const std::string& name) {
    for (const auto& t : extras)
        if (t.name == name) return &t;
    return nullptr;
}

} // namespace

TrainResult run_training(const LinearCode& code, TrainConfig cfg, const ProgressFn& progress) {
    if (cfg.epochs <= 0 || cfg.batches_per_epoch <= 0 || cfg.batch_size <= 0)
        throw TrainError("epochs, batches per epoch and batch size must be positive");
    cfg.model.n = code.n;
    cfg.model.checks = code.H.rows();
    ModelMasks masks = prepare_masks<float>(cfg.model, code.H);

    ModelParams params;
    std::vector<std::vector<float>> adam_m, adam_v;
    std::vector<TrainRecord> records;
    int start_epoch = 0;

    if (!cfg.resume_from.empty()) {
        CheckpointData data = load_checkpoint(cfg.resume_from);
        require_same_config(data.cfg, cfg.model);
        params = checkpoint_params(data);
        const auto* ep = find_extra(data.extras, "opt.epochs");
        if (!ep || ep->v.size() != 1)
            throw TrainError("resume checkpoint carries no optimizer state");
        start_epoch = static_cast<int>(ep->v[0]);
        if (start_epoch >= cfg.epochs)
            throw TrainError("resume checkpoint already covers all requested epochs");
        adam_m.resize(params.tensors.size());
        adam_v.resize(params.tensors.size());
        for (size_t i = 0; i < params.tensors.size(); ++i) {
            const auto* tm = find_extra(data.extras, "opt.m." + params.tensors[i].name);
            const auto* tv = find_extra(data.extras, "opt.v." + params.tensors[i].name);
            if (!tm || !tv || tm->v.size() != params.tensors[i].size() ||
                tv->v.size() != params.tensors[i].size())
                throw TrainError("resume checkpoint optimizer state does not match the layout");
            adam_m[i] = tm->v;
            adam_v[i] = tv->v;
        }
        if (const auto* hist = find_extra(data.extras, "opt.loss")) {
            if (hist->cols != 2 || hist->rows != start_epoch)
                throw TrainError("resume checkpoint loss history is inconsistent");
            for (int e = 0; e < hist->rows; ++e)
                records.push_back({e + 1, hist->v[static_cast<size_t>(e) * 2],
                                   static_cast<double>(hist->v[static_cast<size_t>(e) * 2 + 1])});
        }
    } else {
        params = init_params<float>(cfg.model, cfg.seed);
        adam_m.assign(params.tensors.size(), {});
        adam_v.assign(params.tensors.size(), {});
        for (size_t i = 0; i < params.tensors.size(); ++i) {
            adam_m[i].assign(params.tensors[i].size(), 0.0f);
            adam_v[i].assign(params.tensors[i].size(), 0.0f);
        }
    }

    auto write_checkpoint = [&](int epochs_done) {
        if (cfg.checkpoint_path.empty()) return;
        std::vector<NamedTensor<float>> extras;
        extras.push_back({"opt.step", 1, 1,
                          {static_cast<float>(static_cast<long long>(epochs_done) *
                                              cfg.batches_per_epoch)}});
        extras.push_back({"opt.epochs", 1, 1, {static_cast<float>(epochs_done)}});
        NamedTensor<float> hist;
        hist.name = "opt.loss";
        hist.rows = static_cast<int>(records.size());
        hist.cols = 2;
        for (const auto& r : records) {
            hist.v.push_back(r.mean_loss);
            hist.v.push_back(static_cast<float>(r.lr));
        }
        if (hist.rows > 0) extras.push_back(std::move(hist));
        for (size_t i = 0; i < params.tensors.size(); ++i) {
            extras.push_back({"opt.m." + params.tensors[i].name, params.tensors[i].rows,
                              params.tensors[i].cols, adam_m[i]});
            extras.push_back({"opt.v." + params.tensors[i].name, params.tensors[i].rows,
                              params.tensors[i].cols, adam_v[i]});
        }
        save_checkpoint(cfg.checkpoint_path, params, extras);
    };

    auto write_csv = [&] {
        if (!cfg.loss_csv.empty()) write_file_atomic(cfg.loss_csv, loss_csv_text(records));
    };

    for (int e = start_epoch; e < cfg.epochs; ++e) {
        double loss_sum = 0.0;
        double last_lr = 0.0;
        for (int b = 0; b < cfg.batches_per_epoch; ++b) {
            TrainBatch batch = sample_batch(code, cfg.model, cfg, e, b);
            Tape<float> tape;
            ModelGraph<float> g = build_forward(tape, params, masks, batch.magnitudes,
                                                batch.syndromes, batch.size, true);
            auto loss_id = tape.mean_all(tape.bce_logits_rowsum(g.logits, batch.targets));
            const double loss = tape.value(loss_id)[0];
            if (!std::isfinite(loss))
                throw TrainError("loss is not finite at epoch " + std::to_string(e + 1) +
                                 " batch " + std::to_string(b + 1) + "; aborting");
            tape.backward(loss_id);

            const long long t0 = static_cast<long long>(e) * cfg.batches_per_epoch + b;
            const double lr = lr_at_step(cfg, t0);
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t0 + 1));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t0 + 1));
            for (size_t i = 0; i < params.tensors.size(); ++i) {
                const auto& grad = tape.grad(g.params[i]);
                auto& pv = params.tensors[i].v;
                auto& m = adam_m[i];
                auto& v = adam_v[i];
                for (size_t j = 0; j < pv.size(); ++j) {
                    const double gj = grad.empty() ? 0.0 : static_cast<double>(grad[j]);
                    const double mj = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * gj;
                    const double vj = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * gj * gj;
                    m[j] = static_cast<float>(mj);
                    v[j] = static_cast<float>(vj);
                    pv[j] -= static_cast<float>(lr * (mj / bc1) /
                                                (std::sqrt(vj / bc2) + cfg.adam_eps));
                }
            }
            loss_sum += loss;
            last_lr = lr;
        }
        TrainRecord rec{e + 1, static_cast<float>(loss_sum / cfg.batches_per_epoch), last_lr};
        records.push_back(rec);
        write_csv();
        if ((e + 1) % std::max(cfg.checkpoint_every, 1) == 0 || e + 1 == cfg.epochs)
            write_checkpoint(e + 1);
        if (progress) progress(rec);
    }

    return {std::move(params), std::move(records)};
}

} // namespace eccw
