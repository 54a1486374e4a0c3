#pragma once

#include "eccw/channel.hpp"
#include "eccw/code.hpp"

#include <vector>

namespace eccw {

// Adjacency view of H for message passing.
struct TannerGraph {
    int n = 0, m = 0;
    std::vector<std::vector<int>> check_bits;  // per check: bit indices
    std::vector<std::vector<int>> bit_checks;  // per bit: check indices

    explicit TannerGraph(const BitMatrix& H);
};

struct DecodeResult {
    HardWord x_hat;
    bool converged = false;    // syndrome reached zero
    int iterations_used = 0;   // 0 when the input already satisfied H
};

enum class BpVariant { sum_product, min_sum };

struct BpConfig {
    int max_iterations = 20;
    BpVariant variant = BpVariant::sum_product;
};

// Flooding belief propagation on channel LLRs L_i = 2 y_i / sigma^2
// (positive means bit 0). The hard decision is checked before the first
// iteration and after every iteration; a zero syndrome stops early.
// The sum-product check update clamps the tanh product magnitude at
// 1 - 1e-12 before atanh. min_sum is the plain unnormalized variant.
DecodeResult bp_decode(const TannerGraph& graph, const std::vector<double>& llr, const BpConfig& cfg);

// Convenience wrapper: builds LLRs from a received word.
DecodeResult bp_decode(const TannerGraph& graph, const ReceivedWord& rx, const BpConfig& cfg);

// Exhaustive maximum likelihood over all 2^k codewords, minimizing Euclidean
// distance between y and the modulated codeword. Ties resolve to the
// smallest message index in enumeration order. Refuses k > 24.
DecodeResult ml_decode(const LinearCode& code, const std::vector<double>& y);

} // namespace eccw
