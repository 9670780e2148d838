#include "edgesp/payoffs.hpp"

#include <stdexcept>

namespace edgesp {

double user_payoff(UserType user, Membership m, const MarketState& s, const ModelParams& p) {
    // Operation order matches the SIMD kernels so both paths pick identical labels.
    const double f = user.f;
    const double fr = user.f * user.r;
    switch (m) {
    case Membership::NoSp: return 0.0;
    case Membership::CellSp: return s.delta1 * f - p.phi1;
    case Membership::EdgeSp: return s.delta2 * fr - p.phi2;
    case Membership::HybridSp:
        return s.delta2 * fr + s.delta1 * f - (s.delta1 * s.rho) * fr - p.phi1 - p.phi2;
    }
    return 0.0;
}

std::array<double, 4> all_payoffs(UserType user, const MarketState& state, const ModelParams& params) {
    std::array<double, 4> v{};
    for (auto m : kAllMemberships) v[index_of(m)] = user_payoff(user, m, state, params);
    return v;
}

Membership best_membership(UserType user, const MarketState& state, const ModelParams& params) {
    const auto v = all_payoffs(user, state, params);
    std::size_t best = 0;
    for (std::size_t k = 1; k < 4; ++k) {
        if (v[k] > v[best]) best = k;
    }
    return static_cast<Membership>(best);
}

Membership classify_region(UserType user, double d1, double d2, double rho, double phi) {
    const double f = user.f;
    const double fr = user.f * user.r;
    const double r = user.r;

    // Region conditions with the thresholds multiplied through (f > phi/d1 <=> d1 f > phi
    // for d1 > 0), which keeps them defined when a delta is zero.
    const bool none = d1 * f < phi && d2 * fr < phi;
    const bool cell = d1 * f > phi && d1 - d2 * r > 0 && phi - (d2 - d1 * rho) * fr > 0;
    const bool edge = d2 * fr > phi && d2 * r - d1 > 0 && phi + d1 * rho * fr - d1 * f > 0;
    const bool hybrid = phi - (d2 - d1 * rho) * fr < 0 && phi + d1 * rho * fr - d1 * f < 0 &&
                        (d2 - d1 * rho) * fr + d1 * f - 2 * phi > 0;

    const int hits = int(none) + int(cell) + int(edge) + int(hybrid);
    if (hits == 1) {
        if (none) return Membership::NoSp;
        if (cell) return Membership::CellSp;
        if (edge) return Membership::EdgeSp;
        return Membership::HybridSp;
    }

    ModelParams p;
    p.phi1 = phi;
    p.phi2 = phi;
    MarketState s;
    s.delta1 = d1;
    s.delta2 = d2;
    s.rho = rho;
    return best_membership(user, s, p);
}

Membership classify_region(UserType user, const MarketState& state, const ModelParams& params) {
    if (params.phi1 != params.phi2) {
        throw std::invalid_argument("classify_region: selection regions need phi1 == phi2");
    }
    return classify_region(user, state.delta1, state.delta2, state.rho, params.phi1);
}

IndifferentPoints indifferent_points(double d1, double d2, double rho, double phi) {
    IndifferentPoints out;
    if (!(d1 > 0) || !(d2 > 0)) return out;

    const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    const TypePoint n1{phi / d1, d1 / d2};
    out.n1 = n1;
    out.n1_in_domain = in_unit(n1.f) && in_unit(n1.r);

    const double denom = 1.0 - rho * n1.r;
    if (denom != 0.0) {
        const TypePoint n2{n1.f / denom, n1.r};
        out.n2 = n2;
        out.n2_in_domain = denom > 0 && in_unit(n2.f) && in_unit(n2.r);
    }
    return out;
}

simd::PayoffCoefficients coefficients(const MarketState& state, const ModelParams& params) {
    return {state.delta1, state.delta2, state.rho, params.phi1, params.phi2};
}

} // namespace edgesp
