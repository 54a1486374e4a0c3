#include "doctest.h"

#include "eccw/eval.hpp"

#include <cmath>

using namespace eccw;

namespace {

// Decoder stubs with known error behavior. The transmitted codeword is not
// visible to a ChunkDecoder, but a zero_codeword evaluation makes "echo the
// hard decision" decode perfectly at high SNR and "flip bit 0 of the hard
// decision" err on every frame.
ChunkDecoder echo_decoder() {
    return [](const std::vector<ReceivedWord>& chunk) {
        std::vector<HardWord> out;
        out.reserve(chunk.size());
        for (const auto& rx : chunk) out.push_back(hard_decision(rx.y));
        return out;
    };
}

ChunkDecoder sabotage_decoder() {
    return [](const std::vector<ReceivedWord>& chunk) {
        std::vector<HardWord> out;
        out.reserve(chunk.size());
        for (const auto& rx : chunk) {
            HardWord w = hard_decision(rx.y);
            w[0] ^= 1;
            out.push_back(w);
        }
        return out;
    };
}

} // namespace

TEST_SUITE("eval") {

    TEST_CASE("an error free point runs to the frame cap and reports bounds") {
        LinearCode code = load_code("codes/hamming_7_4.alist");
        EvalConfig cfg;
        cfg.snrs_db = {20.0};  // sigma ~ 0.09, hard decisions are clean
        cfg.min_frame_errors = 10;
        cfg.max_frames = 256;
        cfg.zero_codeword = true;
        EvalResult r = estimate_ber(code, echo_decoder(), cfg);
        REQUIRE(r.points.size() == 1);
        const SnrPoint& p = r.points[0];
        CHECK(p.frames == 256);
        CHECK(p.bit_errors == 0);
        CHECK(p.frame_errors == 0);
        CHECK(p.ber_is_bound());
        CHECK(p.fer_is_bound());
        CHECK(p.ber == doctest::Approx(1.0 / (256.0 * code.n)));
        std::string csv = eval_csv(r);
        CHECK(csv.find("<") != std::string::npos);
        CHECK(csv.find(">") != std::string::npos);
    }

    TEST_CASE("stopping lands on the first chunk boundary past the error budget") {
        LinearCode code = load_code("codes/hamming_7_4.alist");
        EvalConfig cfg;
        cfg.snrs_db = {20.0};
        cfg.min_frame_errors = 500;
        cfg.max_frames = 1'000'000;
        cfg.zero_codeword = true;
        EvalResult r = estimate_ber(code, sabotage_decoder(), cfg);
        const SnrPoint& p = r.points[0];
        // every frame errs, so 8 chunks of 64 reach 512 >= 500
        CHECK(p.frames == 512);
        CHECK(p.frame_errors == 512);
        CHECK(p.bit_errors == 512);
        CHECK(p.fer == doctest::Approx(1.0));
        CHECK(p.ber == doctest::Approx(1.0 / code.n));
        CHECK(!p.ber_is_bound());
    }

    TEST_CASE("worker count and reruns leave the CSV byte identical") {
        LinearCode code = load_code("codes/hamming_7_4.alist");
        DecoderSpec spec;
        spec.kind = DecoderKind::bp;
        spec.bp.max_iterations = 10;
        EvalConfig cfg;
        cfg.snrs_db = {3.0, 5.0};
        cfg.min_frame_errors = 40;
        cfg.max_frames = 20000;
        cfg.seed = 9;
        std::string base = eval_csv(evaluate(code, spec, cfg));
        cfg.workers = 3;
        std::string threaded = eval_csv(evaluate(code, spec, cfg));
        cfg.workers = 1;
        std::string again = eval_csv(evaluate(code, spec, cfg));
        CHECK(base == threaded);
        CHECK(base == again);
        CHECK(base.find("snr_db,sigma,frames,bit_errors,frame_errors,ber,fer,neg_ln_ber")
              != std::string::npos);
    }

    TEST_CASE("random and zero codeword transmissions agree for a symmetric decoder") {
        // BP commutes with codeword sign flips, so the error statistics over
        // the same noise stream match exactly.
        LinearCode code = load_code("codes/hamming_7_4.alist");
        DecoderSpec spec;
        spec.kind = DecoderKind::bp;
        EvalConfig cfg;
        cfg.snrs_db = {4.0};
        cfg.min_frame_errors = 30;
        cfg.max_frames = 10000;
        EvalResult random_words = evaluate(code, spec, cfg);
        cfg.zero_codeword = true;
        EvalResult zero_word = evaluate(code, spec, cfg);
        CHECK(random_words.points[0].bit_errors == zero_word.points[0].bit_errors);
        CHECK(random_words.points[0].frames == zero_word.points[0].frames);
    }

    TEST_CASE("metadata names the run") {
        LinearCode code = load_code("codes/hamming_7_4.alist");
        DecoderSpec spec;
        spec.kind = DecoderKind::ml;
        EvalConfig cfg;
        cfg.snrs_db = {6.0};
        cfg.min_frame_errors = 5;
        cfg.max_frames = 640;
        cfg.channel = ChannelKind::rayleigh;
        EvalResult r = evaluate(code, spec, cfg);
        CHECK(r.code_name == "hamming_7_4");
        CHECK(r.decoder == "ml");
        CHECK(r.channel == "rayleigh");
        CHECK(r.n == 7);
        CHECK(r.k == 4);
        REQUIRE(r.points.size() == 1);
        CHECK(r.points[0].frames > 0);
    }

    TEST_CASE("oversized dimensions cannot reach the exhaustive decoder") {
        LinearCode code = load_code("codes/bch_63_45.alist");
        DecoderSpec spec;
        spec.kind = DecoderKind::ml;
        EvalConfig cfg;
        cfg.snrs_db = {4.0};
        CHECK_THROWS_AS(evaluate(code, spec, cfg), CodeError);
    }

    TEST_CASE("operation counts for the published configuration") {
        BitMatrix H = load_pcm("codes/bch_63_45.alist");
        FlopsReport cross = flops_estimate(Arch::crossmpt, H, 128, 6, 4);
        FlopsReport self = flops_estimate(Arch::ecct, H, 128, 6, 4);
        CHECK(cross.per_layer_dense == 11778048LL);
        CHECK(self.per_layer_dense == 13976064LL);
        CHECK(cross.per_layer_dense < self.per_layer_dense);
        CHECK(cross.per_layer_masked <= cross.per_layer_dense);
        CHECK(self.per_layer_masked <= self.per_layer_dense);
        CHECK(cross.full_forward > 6 * cross.per_layer_masked);  // FFN and head on top
    }

    TEST_CASE("attention economics hold on every full rank code") {
        for (const char* path : {"codes/bch_31_16.alist", "codes/bch_63_45.alist",
                                 "codes/reg_96_48.alist", "codes/wran_384_320.alist"}) {
            CAPTURE(path);
            BitMatrix H = load_pcm(path);
            FlopsReport cross = flops_estimate(Arch::crossmpt, H, 32, 6, 4);
            FlopsReport self = flops_estimate(Arch::ecct, H, 32, 6, 4);
            CHECK(cross.per_layer_dense < self.per_layer_dense);
            CHECK(cross.per_layer_masked <= cross.per_layer_dense);
            CHECK(self.per_layer_masked <= self.per_layer_dense);
        }
    }

    TEST_CASE("wide area network code at small width") {
        BitMatrix H = load_pcm("codes/wran_384_320.alist");
        FlopsReport cross = flops_estimate(Arch::crossmpt, H, 32, 6, 4);
        FlopsReport self = flops_estimate(Arch::ecct, H, 32, 6, 4);
        CHECK(cross.per_layer_dense == 9961472LL);
        CHECK(self.per_layer_dense == 29360128LL);
    }
}
