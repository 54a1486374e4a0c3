#pragma once

#include "eccw/bitmatrix.hpp"

#include <limits>
#include <vector>

namespace eccw {

// Additive attention mask: 0 where a query row may attend to a key column,
// -inf where it may not. Stored as the allow bitmap; the additive form is
// materialized by the model in whatever float width it runs at.
struct AttentionMask {
    int rows = 0, cols = 0;
    std::vector<std::uint8_t> allow;  // row major, 1 = attend

    std::uint8_t at(int r, int c) const { return allow[static_cast<size_t>(r) * cols + c]; }
    long unmasked() const {
        long s = 0;
        for (auto b : allow) s += b;
        return s;
    }

    template <class T>
    std::vector<T> additive() const {
        std::vector<T> m(allow.size());
        for (size_t i = 0; i < allow.size(); ++i)
            m[i] = allow[i] ? T(0) : -std::numeric_limits<T>::infinity();
        return m;
    }
};

// The two cross attention masks. Rows of H index checks, columns index bits;
// the model may only couple a bit with the checks it participates in.
struct MaskSet {
    AttentionMask m2s;  // n x rows(H), queries are magnitude tokens
    AttentionMask s2m;  // rows(H) x n, queries are syndrome tokens
};

MaskSet build_crossmpt_masks(const BitMatrix& H);

// Self-attention mask over the n + rows(H) token sequence. Bit tokens attend
// to themselves and to bits sharing at least one check (distance two on the
// Tanner graph); bit/check pairs follow H; check tokens see only themselves.
// With ablate_self_blocks the bit/bit and check/check blocks keep only their
// diagonals, leaving the cross blocks as the sole coupling.
AttentionMask build_ecct_mask(const BitMatrix& H, bool ablate_self_blocks = false);

// fraction of allowed entries
double mask_density(const AttentionMask& m);

// Per-block unmasked counts of the ECCT mask, in the order MM, MS, SM, SS.
struct EcctMaskBreakdown {
    long mm = 0, ms = 0, sm = 0, ss = 0;
};
EcctMaskBreakdown ecct_mask_breakdown(const AttentionMask& mask, int n);

} // namespace eccw
