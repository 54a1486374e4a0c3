#include "eccw/masks.hpp"

namespace eccw {

MaskSet build_crossmpt_masks(const BitMatrix& H) {
    const int m = H.rows(), n = H.cols();
    MaskSet set;
    set.m2s.rows = n;
    set.m2s.cols = m;
    set.m2s.allow.assign(static_cast<size_t>(n) * m, 0);
    set.s2m.rows = m;
    set.s2m.cols = n;
    set.s2m.allow.assign(static_cast<size_t>(m) * n, 0);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            if (H.at(r, c)) {
                set.m2s.allow[static_cast<size_t>(c) * m + r] = 1;  // g(H^T)
                set.s2m.allow[static_cast<size_t>(r) * n + c] = 1;  // g(H)
            }
    return set;
}

AttentionMask build_ecct_mask(const BitMatrix& H, bool ablate_self_blocks) {
    const int m = H.rows(), n = H.cols();
    const int L = n + m;
    AttentionMask mask;
    mask.rows = mask.cols = L;
    mask.allow.assign(static_cast<size_t>(L) * L, 0);
    auto allow = [&](int r, int c) { mask.allow[static_cast<size_t>(r) * L + c] = 1; };

    for (int i = 0; i < L; ++i) allow(i, i);

    if (!ablate_self_blocks) {
        // bits sharing a check: walk each check row, connect all its bit pairs
        for (int r = 0; r < m; ++r)
            for (int a = 0; a < n; ++a)
                if (H.at(r, a))
                    for (int b = a + 1; b < n; ++b)
                        if (H.at(r, b)) {
                            allow(a, b);
                            allow(b, a);
                        }
    }

    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            if (H.at(r, c)) {
                allow(c, n + r);
                allow(n + r, c);
            }

    return mask;
}

double mask_density(const AttentionMask& m) {
    if (m.allow.empty()) return 0.0;
    return static_cast<double>(m.unmasked()) / static_cast<double>(m.allow.size());
}

EcctMaskBreakdown ecct_mask_breakdown(const AttentionMask& mask, int n) {
    EcctMaskBreakdown b;
    const int L = mask.rows;
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            if (!mask.at(r, c)) continue;
            if (r < n && c < n) ++b.mm;
            else if (r < n) ++b.ms;
            else if (c < n) ++b.sm;
            else ++b.ss;
        }
    return b;
}

} // namespace eccw
