#pragma once

#include "eccw/code.hpp"
#include "eccw/rng.hpp"

#include <vector>

namespace eccw {

// Soft channel output plus the noise level it was produced with.
struct ReceivedWord {
    std::vector<double> y;
    double sigma = 0.0;
};

// bit 0 -> +1, bit 1 -> -1
std::vector<double> modulate_bpsk(const HardWord& x);

// Eb/N0 given in dB; rate = k/n. Unit symbol energy.
double ebno_to_sigma(double ebno_db, double rate);

ReceivedWord transmit_awgn(const std::vector<double>& x_s, double sigma, Rng& rng);

// y_i = h_i x_i + sigma z_i with h_i Rayleigh of scale 1 (mean sqrt(pi/2));
// the fading coefficients are not returned, decoding is blind.
ReceivedWord transmit_rayleigh(const std::vector<double>& x_s, double sigma, Rng& rng);

// Multiplicative noise labels: target_i = 1 iff y_i and the transmitted sign
// disagree. Identical to hard_decision(y) xor x, which callers can use as a
// cross-check.
HardWord noise_target(const std::vector<double>& y, const HardWord& x);

} // namespace eccw
