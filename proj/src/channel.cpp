#include "eccw/channel.hpp"

#include <cmath>

namespace eccw {

std::vector<double> modulate_bpsk(const HardWord& x) {
    std::vector<double> s(x.size());
    for (size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? -1.0 : 1.0;
    return s;
}

double ebno_to_sigma(double ebno_db, double rate) {
    return 1.0 / std::sqrt(2.0 * rate * std::pow(10.0, ebno_db / 10.0));
}

ReceivedWord transmit_awgn(const std::vector<double>& x_s, double sigma, Rng& rng) {
    GaussianSampler gauss;
    ReceivedWord rx;
    rx.sigma = sigma;
    rx.y.resize(x_s.size());
    for (size_t i = 0; i < x_s.size(); ++i) rx.y[i] = x_s[i] + sigma * gauss(rng);
    return rx;
}

ReceivedWord transmit_rayleigh(const std::vector<double>& x_s, double sigma, Rng& rng) {
    GaussianSampler gauss;
    ReceivedWord rx;
    rx.sigma = sigma;
    rx.y.resize(x_s.size());
    for (size_t i = 0; i < x_s.size(); ++i) {
        double a = gauss(rng), b = gauss(rng);
        double h = std::sqrt(a * a + b * b);
        rx.y[i] = h * x_s[i] + sigma * gauss(rng);
    }
    return rx;
}

HardWord noise_target(const std::vector<double>& y, const HardWord& x) {
    HardWord t(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        double sign = x[i] ? -1.0 : 1.0;
        t[i] = (y[i] * sign) < 0.0 ? 1 : 0;
    }
    return t;
}

} // namespace eccw
