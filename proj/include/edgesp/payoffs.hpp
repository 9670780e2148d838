#pragma once

#include <array>
#include <optional>

#include "edgesp/derived.hpp"
#include "edgesp/membership.hpp"
#include "edgesp/model.hpp"
#include "edgesp/simd/kernels.hpp"

namespace edgesp {

/// Expected per-slot payoff of a type-(f, r) user under membership m.
///   V(N) = 0
///   V(C) = delta1 f - phi1
///   V(E) = delta2 f r - phi2
///   V(H) = delta2 f r + delta1 f - delta1 rho f r - phi1 - phi2
/// delta1 and delta2 are read from the state, so the evaluator accepts phi1 != phi2.
double user_payoff(UserType user, Membership m, const MarketState& state, const ModelParams& params);

std::array<double, 4> all_payoffs(UserType user, const MarketState& state, const ModelParams& params);

/// Argmax of user_payoff; ties resolve to the earlier of N, C, E, H.
Membership best_membership(UserType user, const MarketState& state, const ModelParams& params);

/// Membership from the closed-form selection regions (requires a common joining cost phi).
/// On region boundaries, or where no strict region applies, falls back to the argmax tie-break.
Membership classify_region(UserType user, double delta1, double delta2, double rho, double phi);

/// Same, reading deltas from the state. Throws std::invalid_argument when phi1 != phi2.
Membership classify_region(UserType user, const MarketState& state, const ModelParams& params);

struct TypePoint {
    double f = 0.0;
    double r = 0.0;
};

/// N1: N/C/E are equally good. N2: C/E/H are equally good.
struct IndifferentPoints {
    std::optional<TypePoint> n1;
    bool n1_in_domain = false;
    std::optional<TypePoint> n2;
    bool n2_in_domain = false;
};

/// Both points are absent when delta1 <= 0 or delta2 <= 0.
IndifferentPoints indifferent_points(double delta1, double delta2, double rho, double phi);

/// Payoff coefficients for the classification kernels.
simd::PayoffCoefficients coefficients(const MarketState& state, const ModelParams& params);

} // namespace edgesp
