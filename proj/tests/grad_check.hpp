#pragma once

// Central-difference gradient verification shared by the tensor tests, the
// model tests and the acceptance gate. The problem owns its parameter
// arrays; eval() rebuilds the computation from scratch for every probe, so
// the check exercises exactly what training exercises.

#include "eccw/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace gradcheck {

struct Problem {
    // One entry per differentiable tensor.
    std::vector<std::vector<double>> params;
    // Evaluates the scalar at the given parameter values. When grads is not
    // null, also fills it (same shapes as params) with analytic gradients.
    std::function<double(const std::vector<std::vector<double>>& values,
                         std::vector<std::vector<double>>* grads)>
        eval;
};

struct Report {
    double max_rel_err = 0.0;
    int coords_checked = 0;
};

// Compares analytic gradients against central differences on up to
// max_coords coordinates per tensor (all of them when the tensor is small).
// Relative error uses |a - n| / max(floor, |a| + |n|).
inline Report run(Problem& p, double eps = 1e-4, int max_coords = 32,
                  std::uint64_t seed = 12345, double floor = 1e-6) {
    std::vector<std::vector<double>> analytic(p.params.size());
    for (size_t i = 0; i < p.params.size(); ++i)
        analytic[i].assign(p.params[i].size(), 0.0);
    p.eval(p.params, &analytic);

    eccw::Rng rng(seed);
    Report rep;
    for (size_t i = 0; i < p.params.size(); ++i) {
        const size_t sz = p.params[i].size();
        std::vector<size_t> coords;
        if (static_cast<int>(sz) <= max_coords) {
            for (size_t j = 0; j < sz; ++j) coords.push_back(j);
        } else {
            for (int c = 0; c < max_coords; ++c)
                coords.push_back(static_cast<size_t>(eccw::uniform01(rng) * sz) % sz);
        }
        for (size_t j : coords) {
            const double keep = p.params[i][j];
            p.params[i][j] = keep + eps;
            const double up = p.eval(p.params, nullptr);
            p.params[i][j] = keep - eps;
            const double dn = p.eval(p.params, nullptr);
            p.params[i][j] = keep;
            const double numeric = (up - dn) / (2.0 * eps);
            const double a = analytic[i][j];
            const double err = std::abs(a - numeric) / std::max(floor, std::abs(a) + std::abs(numeric));
            if (err > rep.max_rel_err) rep.max_rel_err = err;
            ++rep.coords_checked;
        }
    }
    return rep;
}

} // namespace gradcheck
