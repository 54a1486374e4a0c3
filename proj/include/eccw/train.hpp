#pragma once

// Supervised training of the transformer decoders. The label for a received
// word is the multiplicative noise pattern, which depends only on the noise,
// so training can transmit the all-zero codeword without loss of generality;
// a random-codeword mode exists to demonstrate exactly that equivalence.

#include "eccw/code.hpp"
#include "eccw/model.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eccw {

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    ModelConfig model;  // n and checks are overwritten from the code
    int epochs = 1000;
    int batches_per_epoch = 1000;
    int batch_size = 128;
    double lr_start = 1e-4;
    double lr_end = 5e-7;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    // Eb/N0 grid for sampling: integer dB values in [lo, hi], or uniform on
    // the continuous interval when continuous_ebno is set.
    int ebno_lo = 3;
    int ebno_hi = 7;
    bool continuous_ebno = false;
    bool zero_codeword = true;
    std::uint64_t seed = 1;
    std::string checkpoint_path;  // empty disables checkpointing
    int checkpoint_every = 10;    // epochs between checkpoint writes
    std::string loss_csv;         // empty disables the loss curve file
    std::string resume_from;      // checkpoint to continue from
};

struct TrainRecord {
    int epoch = 0;       // 1-based, the epoch just finished
    float mean_loss = 0.0f;
    double lr = 0.0;     // learning rate at the epoch's last step
};

struct TrainResult {
    ModelParams params;
    std::vector<TrainRecord> records;
};

// Inputs and labels for one optimization step, sample major.
struct TrainBatch {
    int size = 0;
    std::vector<float> magnitudes;  // size x n
    std::vector<float> syndromes;   // size x checks, embedding coefficients
    std::vector<float> targets;     // size x n, 1 where the channel flipped a sign
};

// Batch for step (epoch, batch_idx). The RNG is derived from those indices
// alone, so a resumed run resamples the very same data.
TrainBatch sample_batch(const LinearCode& code, const ModelConfig& model, const TrainConfig& cfg,
                        int epoch, int batch_idx);

// Mean over the batch of the per-sample summed binary cross entropy.
// Forward only; useful for probing the loss at a given parameter set.
double batch_loss(const ModelParams& params, const ModelMasks& masks, const TrainBatch& batch);

// Cosine schedule from lr_start to lr_end across all steps of the run.
double lr_at_step(const TrainConfig& cfg, long long step_index);

using ProgressFn = std::function<void(const TrainRecord&)>;

TrainResult run_training(const LinearCode& code, TrainConfig cfg, const ProgressFn& progress = {});

} // namespace eccw
