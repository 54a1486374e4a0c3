#include "doctest.h"

#include "eccw/channel.hpp"

#include <cmath>
#include <numbers>

using namespace eccw;

TEST_SUITE("channel") {

    TEST_CASE("BPSK mapping") {
        auto x = modulate_bpsk({0, 1, 1, 0});
        REQUIRE(x.size() == 4);
        CHECK(x[0] == 1.0);
        CHECK(x[1] == -1.0);
        CHECK(x[2] == -1.0);
        CHECK(x[3] == 1.0);
    }

    TEST_CASE("Eb/N0 to sigma") {
        // sigma = 1 / sqrt(2 R 10^(dB/10)) at unit symbol energy
        CHECK(ebno_to_sigma(3.0, 0.5) == doctest::Approx(0.7079457844).epsilon(1e-9));
        CHECK(ebno_to_sigma(0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ebno_to_sigma(0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        // 10 dB more noise power shrinks sigma by sqrt(10)
        CHECK(ebno_to_sigma(14.0, 0.5) ==
              doctest::Approx(ebno_to_sigma(4.0, 0.5) / std::sqrt(10.0)).epsilon(1e-12));
    }

    TEST_CASE("AWGN sample moments") {
        const size_t n = 200000;
        const double sigma = 0.8;
        std::vector<double> x_s(n, 1.0);
        Rng rng(2024);
        ReceivedWord rx = transmit_awgn(x_s, sigma, rng);
        REQUIRE(rx.y.size() == n);
        CHECK(rx.sigma == sigma);
        double mean = 0.0;
        for (double v : rx.y) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : rx.y) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n - 1);
        // standard errors ~0.002; tolerances sit at several of those
        CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
        CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.02));
    }

    TEST_CASE("Rayleigh fading keeps the sign and the scale-1 mean") {
        const size_t n = 200000;
        std::vector<double> x_s(n, 1.0);
        Rng rng(17);
        ReceivedWord rx = transmit_rayleigh(x_s, 0.0, rng);
        double mean = 0.0;
        for (double v : rx.y) {
            CHECK(v > 0.0);  // pure fading never flips a sign
            mean += v;
        }
        mean /= static_cast<double>(n);
        CHECK(mean == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(0.01));
    }

    TEST_CASE("noise_target equals hard decision xor transmitted bits") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            HardWord x(31);
            for (auto& b : x) b = uniform01(rng) < 0.5 ? 1 : 0;
            ReceivedWord rx = transmit_awgn(modulate_bpsk(x), 1.0, rng);
            HardWord t = noise_target(rx.y, x);
            HardWord h = hard_decision(rx.y);
            REQUIRE(t.size() == x.size());
            for (size_t i = 0; i < x.size(); ++i)
                CHECK(t[i] == static_cast<std::uint8_t>(h[i] ^ x[i]));
        }
    }

    TEST_CASE("draws are reproducible per seed") {
        std::vector<double> x_s(64, 1.0);
        Rng a(99), b(99), c(100);
        auto ya = transmit_awgn(x_s, 0.7, a).y;
        auto yb = transmit_awgn(x_s, 0.7, b).y;
        auto yc = transmit_awgn(x_s, 0.7, c).y;
        CHECK(ya == yb);
        CHECK(ya != yc);
    }
}
