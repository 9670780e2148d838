#include "edgesp/derived.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "edgesp/simd/kernels.hpp"

namespace edgesp {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
        else carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

} // namespace

ZipfCatalog::ZipfCatalog(std::int64_t S, double gamma) : gamma_(gamma) {
    if (S < 1) throw std::invalid_argument("zipf catalog: S must be >= 1, got " + std::to_string(S));
    if (!(gamma > 0)) throw std::invalid_argument("zipf catalog: gamma must be > 0");

    const auto n = static_cast<std::size_t>(S);
    pmf_.resize(n);
    CompensatedSum norm;
    for (std::size_t s = 0; s < n; ++s) {
        pmf_[s] = std::pow(static_cast<double>(s + 1), -gamma);
        norm.add(pmf_[s]);
    }
    const double z = norm.value();
    for (auto& g : pmf_) g /= z;

    cdf_.resize(n);
    CompensatedSum run;
    for (std::size_t s = 0; s < n; ++s) {
        run.add(pmf_[s]);
        cdf_[s] = std::min(run.value(), 1.0);
    }
    cdf_.back() = 1.0;
}

ZipfCatalog build_catalog(std::int64_t S, double gamma) { return ZipfCatalog(S, gamma); }

double cache_hit_prob(const ZipfCatalog& catalog, double alpha2) {
    const auto S = catalog.size();
    if (!(alpha2 >= 0.0) || alpha2 > static_cast<double>(S)) {
        throw std::out_of_range("cache_hit_prob: alpha2 = " + std::to_string(alpha2) +
                                " outside [0, " + std::to_string(S) + "]");
    }
    const double whole = std::floor(alpha2);
    const auto k = static_cast<std::int64_t>(whole);
    double rho = catalog.cdf(k);
    if (k < S) rho += (alpha2 - whole) * catalog.pmf(k + 1);
    return std::clamp(rho, 0.0, 1.0);
}

RequestLoads expected_requests(const Population& population, const MembershipAssignment& assignment,
                               double rho) {
    if (assignment.size() != population.size()) {
        throw std::invalid_argument("expected_requests: assignment has " +
                                    std::to_string(assignment.size()) + " labels for " +
                                    std::to_string(population.size()) + " users");
    }
    const auto sums = simd::kernels().loads(population.f().data(), population.r().data(),
                                            assignment.labels.data(), population.size(), rho);
    return {sums[0], sums[1]};
}

double sponsor_prob(double alpha1, double n_c) {
    if (alpha1 < 0 || n_c < 0) {
        throw std::invalid_argument("sponsor_prob: negative input (alpha1 = " + std::to_string(alpha1) +
                                    ", n_c = " + std::to_string(n_c) + ")");
    }
    if (n_c == 0.0) return alpha1 > 0.0 ? 1.0 : 0.0;
    return std::min(alpha1 / n_c, 1.0);
}

MarketState make_state(double rho, RequestLoads loads, double p, const ModelParams& params) {
    MarketState s;
    s.rho = rho;
    s.n_c = loads.n_c;
    s.n_e = loads.n_e;
    s.p = p;
    s.delta1 = (params.v - params.c1) * p;
    s.delta2 = (params.v - params.c2) * rho;
    return s;
}

MarketState market_state(const Population& population, const MembershipAssignment& assignment,
                         const Budgets& budgets, const ModelParams& params,
                         const ZipfCatalog& catalog) {
    const double rho = cache_hit_prob(catalog, budgets.alpha2);
    const auto loads = expected_requests(population, assignment, rho);
    // Rounding can leave a hair below zero when every H user has r*rho == 1.
    const double n_c = std::max(loads.n_c, 0.0);
    return make_state(rho, {n_c, loads.n_e}, sponsor_prob(budgets.alpha1, n_c), params);
}

} // namespace edgesp
