#include "eccw/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eccw {

TannerGraph::TannerGraph(const BitMatrix& H) : n(H.cols()), m(H.rows()) {
    check_bits.resize(m);
    bit_checks.resize(n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            if (H.at(r, c)) {
                check_bits[r].push_back(c);
                bit_checks[c].push_back(r);
            }
}

namespace {

HardWord hard_from_llr(const std::vector<double>& belief) {
    HardWord x(belief.size());
    for (size_t i = 0; i < belief.size(); ++i) x[i] = belief[i] < 0.0 ? 1 : 0;
    return x;
}

bool satisfies(const TannerGraph& g, const HardWord& x) {
    for (const auto& bits : g.check_bits) {
        std::uint8_t parity = 0;
        for (int b : bits) parity ^= x[b];
        if (parity) return false;
    }
    return true;
}

} // namespace

DecodeResult bp_decode(const TannerGraph& graph, const std::vector<double>& llr, const BpConfig& cfg) {
    DecodeResult res;
    res.x_hat = hard_from_llr(llr);
    if (satisfies(graph, res.x_hat)) {
        res.converged = true;
        res.iterations_used = 0;
        return res;
    }

    // edge arrays laid out check by check
    std::vector<int> edge_start(graph.m + 1, 0);
    for (int c = 0; c < graph.m; ++c)
        edge_start[c + 1] = edge_start[c] + static_cast<int>(graph.check_bits[c].size());
    const int n_edges = edge_start[graph.m];

    std::vector<double> v2c(n_edges), c2v(n_edges, 0.0);
    // bit -> its edge ids, aligned with bit_checks
    std::vector<std::vector<int>> bit_edges(graph.n);
    for (int c = 0; c < graph.m; ++c)
        for (size_t i = 0; i < graph.check_bits[c].size(); ++i) {
            int e = edge_start[c] + static_cast<int>(i);
            v2c[e] = llr[graph.check_bits[c][i]];
            bit_edges[graph.check_bits[c][i]].push_back(e);
        }

    constexpr double kClamp = 1.0 - 1e-12;
    std::vector<double> fwd, bwd;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        // check node update, excluding the target edge via prefix/suffix products
        for (int c = 0; c < graph.m; ++c) {
            const int deg = edge_start[c + 1] - edge_start[c];
            const int base = edge_start[c];
            if (deg == 1) {  // a degree-1 check pins its bit regardless of messages
                c2v[base] = std::numeric_limits<double>::infinity();
                continue;
            }
            fwd.assign(deg + 1, 0.0);
            bwd.assign(deg + 1, 0.0);
            if (cfg.variant == BpVariant::sum_product) {
                fwd[0] = 1.0;
                bwd[deg] = 1.0;
                for (int i = 0; i < deg; ++i) fwd[i + 1] = fwd[i] * std::tanh(0.5 * v2c[base + i]);
                for (int i = deg - 1; i >= 0; --i) bwd[i] = bwd[i + 1] * std::tanh(0.5 * v2c[base + i]);
                for (int i = 0; i < deg; ++i) {
                    double prod = fwd[i] * bwd[i + 1];
                    prod = std::clamp(prod, -kClamp, kClamp);
                    c2v[base + i] = 2.0 * std::atanh(prod);
                }
            } else {
                // min-sum: track min and second min of |v2c|, product of signs
                double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
                int min_idx = -1;
                int sign = 1;
                for (int i = 0; i < deg; ++i) {
                    double v = v2c[base + i];
                    if (v < 0) sign = -sign;
                    double a = std::abs(v);
                    if (a < min1) {
                        min2 = min1;
                        min1 = a;
                        min_idx = i;
                    } else if (a < min2) {
                        min2 = a;
                    }
                }
                for (int i = 0; i < deg; ++i) {
                    int s = sign;
                    if (v2c[base + i] < 0) s = -s;  // remove own sign
                    c2v[base + i] = s * (i == min_idx ? min2 : min1);
                }
            }
        }

        // bit node update and tentative decision
        std::vector<double> belief(llr);
        for (int b = 0; b < graph.n; ++b)
            for (int e : bit_edges[b]) belief[b] += c2v[e];
        for (int c = 0; c < graph.m; ++c)
            for (int i = edge_start[c]; i < edge_start[c + 1]; ++i) {
                int b = graph.check_bits[c][i - edge_start[c]];
                v2c[i] = belief[b] - c2v[i];
            }

        res.x_hat = hard_from_llr(belief);
        res.iterations_used = iter;
        if (satisfies(graph, res.x_hat)) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

DecodeResult bp_decode(const TannerGraph& graph, const ReceivedWord& rx, const BpConfig& cfg) {
    std::vector<double> llr(rx.y.size());
    const double s2 = rx.sigma * rx.sigma;
    for (size_t i = 0; i < rx.y.size(); ++i) llr[i] = 2.0 * rx.y[i] / s2;
    return bp_decode(graph, llr, cfg);
}

DecodeResult ml_decode(const LinearCode& code, const std::vector<double>& y) {
    if (code.k > 24)
        throw CodeError(code.name + ": ml_decode refuses k=" + std::to_string(code.k) + " (limit 24)");
    if (static_cast<int>(y.size()) != code.n)
        throw CodeError(code.name + ": ml_decode length mismatch");

    const std::uint64_t count = 1ULL << code.k;
    HardWord x(code.n, 0);  // codeword for message index 0
    auto dist = [&](const HardWord& w) {
        double d = 0.0;
        for (int i = 0; i < code.n; ++i) {
            double s = w[i] ? -1.0 : 1.0;
            d += (y[i] - s) * (y[i] - s);
        }
        return d;
    };

    double best = dist(x);
    HardWord best_x = x;

    // Walk message indices in integer order; incrementing flips the trailing
    // ones plus one, so the codeword updates by xor of just those G rows.
    for (std::uint64_t idx = 1; idx < count; ++idx) {
        std::uint64_t changed = idx ^ (idx - 1);
        for (int bit = 0; changed; ++bit, changed >>= 1)
            if (changed & 1) {
                const std::uint8_t* row = code.G.row(bit);
                for (int c = 0; c < code.n; ++c) x[c] ^= row[c];
            }
        double d = dist(x);
        if (d < best) {
            best = d;
            best_x = x;
        }
    }
    DecodeResult res;
    res.x_hat = std::move(best_x);
    res.converged = true;
    res.iterations_used = 0;
    return res;
}

} // namespace eccw
