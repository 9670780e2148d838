#pragma once
// Independent reference formulas for the tests. These are written in the raw request-count
// form (sponsored fraction times per-request gain), not the delta form the library uses.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "edgesp/model.hpp"

namespace edgesp::testing {

struct RawMarket {
    double p = 0.0;
    double rho = 0.0;
};

inline std::array<double, 4> oracle_payoffs(double f, double r, RawMarket m, const ModelParams& k) {
    const double cell_gain = m.p * (k.v - k.c1);
    const double edge_gain = m.rho * (k.v - k.c2);
    const double edge_requests = f * r;
    const double cell_requests_hybrid = f - edge_requests * m.rho;
    return {
        0.0,
        f * cell_gain - k.phi1,
        edge_requests * edge_gain - k.phi2,
        cell_requests_hybrid * cell_gain + edge_requests * edge_gain - k.phi1 - k.phi2,
    };
}

inline int oracle_argmax(const std::array<double, 4>& v) {
    int best = 0;
    for (int k = 1; k < 4; ++k) {
        if (v[k] > v[best]) best = k;
    }
    return best;
}

/// Zipf pmf by direct normalization, no compensated summation.
inline std::vector<double> oracle_zipf(int S, double gamma) {
    std::vector<double> w(S);
    double z = 0.0;
    for (int s = 1; s <= S; ++s) {
        w[s - 1] = 1.0 / std::pow(static_cast<double>(s), gamma);
        z += w[s - 1];
    }
    for (auto& x : w) x /= z;
    return w;
}

inline Population random_population(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> f(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = u(rng);
        r[i] = u(rng);
    }
    return Population(std::move(f), std::move(r), seed);
}

} // namespace edgesp::testing
