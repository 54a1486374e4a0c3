#include "doctest.h"

#include "eccw/masks.hpp"

#include <cmath>

using namespace eccw;

namespace {

BitMatrix tree_code() {
    BitMatrix H(2, 3);
    H.at(0, 0) = 1;
    H.at(0, 1) = 1;
    H.at(1, 1) = 1;
    H.at(1, 2) = 1;
    return H;
}

// Density over the raw file contents, redundant rows included.
void check_table_row(const char* path, double rho1_pct, double rho2_pct) {
    CAPTURE(path);
    BitMatrix H = load_pcm(path);
    double ecct = 100.0 * mask_density(build_ecct_mask(H));
    double cross = 100.0 * mask_density(build_crossmpt_masks(H).m2s);
    CHECK(std::abs(ecct - rho1_pct) < 0.005);
    CHECK(std::abs(cross - rho2_pct) < 0.005);
    CHECK(cross < ecct);
}

} // namespace

TEST_SUITE("masks") {

    TEST_CASE("cross attention masks mirror H") {
        BitMatrix H = tree_code();
        MaskSet ms = build_crossmpt_masks(H);
        REQUIRE(ms.m2s.rows == 3);
        REQUIRE(ms.m2s.cols == 2);
        REQUIRE(ms.s2m.rows == 2);
        REQUIRE(ms.s2m.cols == 3);
        for (int c = 0; c < 2; ++c)
            for (int b = 0; b < 3; ++b) {
                CHECK(ms.m2s.at(b, c) == H.at(c, b));
                CHECK(ms.s2m.at(c, b) == H.at(c, b));
            }
        CHECK(ms.m2s.unmasked() == H.ones());
        CHECK(ms.s2m.unmasked() == H.ones());
    }

    TEST_CASE("self attention block structure on the tree code") {
        AttentionMask m = build_ecct_mask(tree_code());
        REQUIRE(m.rows == 5);
        REQUIRE(m.cols == 5);
        EcctMaskBreakdown b = ecct_mask_breakdown(m, 3);
        CHECK(b.mm == 7);   // 3 self + bit pairs {0,1} and {1,2} both ways
        CHECK(b.ms == 4);   // ones(H)
        CHECK(b.sm == 4);
        CHECK(b.ss == 2);   // check diagonal
        CHECK(m.unmasked() == 17);
        CHECK(mask_density(m) == doctest::Approx(17.0 / 25.0));
        // bits 0 and 2 share no check, so they stay decoupled
        CHECK(m.at(0, 2) == 0);
        CHECK(m.at(2, 0) == 0);
    }

    TEST_CASE("self attention mask is symmetric") {
        for (const char* path : {"codes/hamming_7_4.alist", "codes/bch_31_16.alist"}) {
            CAPTURE(path);
            AttentionMask m = build_ecct_mask(load_pcm(path));
            for (int r = 0; r < m.rows; ++r)
                for (int c = 0; c < m.cols; ++c) CHECK(m.at(r, c) == m.at(c, r));
        }
    }

    TEST_CASE("ablating the self blocks keeps only their diagonals") {
        BitMatrix H = load_pcm("codes/hamming_7_4.alist");
        AttentionMask full = build_ecct_mask(H);
        AttentionMask abl = build_ecct_mask(H, true);
        EcctMaskBreakdown b = ecct_mask_breakdown(abl, H.cols());
        CHECK(b.mm == H.cols());
        CHECK(b.ss == H.rows());
        CHECK(b.ms == H.ones());
        CHECK(b.sm == H.ones());
        EcctMaskBreakdown fb = ecct_mask_breakdown(full, H.cols());
        CHECK(fb.ms == b.ms);  // cross blocks are untouched
        CHECK(fb.sm == b.sm);
        CHECK(fb.mm > b.mm);   // Hamming couples every bit pair through some check
    }

    TEST_CASE("published density table") {
        check_table_row("codes/bch_63_45.alist", 53.09, 32.45);
        check_table_row("codes/ldpc_121_70.alist", 24.01, 9.09);
        check_table_row("codes/ldpc_121_80.alist", 21.94, 9.09);
        check_table_row("codes/turbo_132_40.alist", 14.25, 11.43);
        check_table_row("codes/wran_384_320.alist", 13.25, 5.21);
    }

    TEST_CASE("additive materialization") {
        AttentionMask m = build_crossmpt_masks(tree_code()).s2m;
        auto add = m.additive<float>();
        REQUIRE(add.size() == static_cast<size_t>(m.rows) * m.cols);
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) {
                float v = add[static_cast<size_t>(r) * m.cols + c];
                if (m.at(r, c))
                    CHECK(v == 0.0f);
                else
                    CHECK(v == -std::numeric_limits<float>::infinity());
            }
    }
}
