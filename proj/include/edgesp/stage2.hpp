#pragma once

#include <cstdint>
#include <vector>

#include "edgesp/derived.hpp"
#include "edgesp/membership.hpp"
#include "edgesp/model.hpp"
#include "edgesp/payoffs.hpp"

namespace edgesp {

/// One row of the membership dynamics: fractions after a round, and the market they induce.
struct TraceRow {
    MuVector mu{};
    double p = 0.0;
    double rho = 0.0;
    double n_c = 0.0;
    double n_e = 0.0;
};

TraceRow make_trace_row(const MembershipAssignment& assignment, const MarketState& state);

struct EquilibriumResult {
    MembershipAssignment assignment;
    MarketState state;        ///< induced by `assignment`
    TraceRow initial;         ///< the starting assignment, before any round
    std::vector<TraceRow> trace; ///< one row per round; size() == iterations
    int iterations = 0;
    bool converged = false;
    /// The synchronous dynamics cycled and asynchronous own-impact updates took over. A result
    /// that converged this way is a Nash equilibrium of the finite game, and may differ from a
    /// synchronous fixed point by users within O(1/U) of an indifference threshold.
    bool cycle_broken = false;
};

struct StepResult {
    MembershipAssignment assignment; ///< every user's best response
    MarketState state;               ///< the state the users responded to
};

/// One synchronous round: the state is computed from `assignment`, then every user best-responds.
StepResult best_response_step(const Population& population, const MembershipAssignment& assignment,
                              const Budgets& budgets, const ModelParams& params,
                              const ZipfCatalog& catalog);

struct DynamicsOptions {
    int max_iters = 500;
    std::uint64_t seed = 0; ///< permutation seed for the asynchronous fallback
};

/// Best membership for one user who accounts for their own effect on the sponsor
/// probability: each candidate is scored at the P that would result from choosing it.
/// `n_c` is the current cellular load including the user's `current` contribution.
Membership own_impact_best_response(UserType user, Membership current, double n_c,
                                    const Budgets& budgets, double rho, const ModelParams& params);

/// Synchronous best-response dynamics until the assignment stops changing.
///
/// With finitely many users the synchronous map can lack a fixed point: a user whose own
/// switch moves P across their indifference threshold alternates forever. When an
/// assignment repeats, the solver switches to asynchronous updates in a seeded random order
/// where each user accounts for their own effect on P (own_impact_best_response), and stops
/// at the first full pass without changes. Each asynchronous pass counts as one round.
/// Never throws on non-convergence.
EquilibriumResult solve_dynamics(const Population& population, const Budgets& budgets,
                                 const ModelParams& params, const ZipfCatalog& catalog,
                                 const MembershipAssignment& init, const DynamicsOptions& options = {});

/// All-N cold start.
EquilibriumResult solve_dynamics(const Population& population, const Budgets& budgets,
                                 const ModelParams& params, const ZipfCatalog& catalog,
                                 const DynamicsOptions& options = {});

struct FixedPointResult {
    double p_star = 0.0;
    MuVector mu{};
    double n_c = 0.0;
    double n_e = 0.0;
    double rho = 0.0;
    bool bracketed = true; ///< false when a boundary P in {0, 1} solved the equation directly
    int steps = 0;
};

/// Stage-II equilibrium reduced to the sponsor probability: solves P = min(alpha1 / N_C(P), 1)
/// by bisection, where N_C(P) classifies every user at delta1 = (v - c1) P. N_C is
/// non-decreasing in P, so the root is unique.
FixedPointResult solve_fixedpoint(const Budgets& budgets, const ModelParams& params,
                                  const ZipfCatalog& catalog, const Population& population);

/// Continuum variant: integrates over uniform types on the unit square with a midpoint
/// rule of grid_resolution^2 cells, scaled to U users. grid_resolution must be >= 100.
FixedPointResult solve_fixedpoint(const Budgets& budgets, const ModelParams& params,
                                  const ZipfCatalog& catalog, int grid_resolution);

/// Loads and fractions when every type best-responds to sponsor probability p.
simd::ClassifyTotals classify_at(const simd::TypeView& types, double p, double rho,
                                 const ModelParams& params, Membership* labels = nullptr);

struct Deviation {
    std::size_t user = 0;
    Membership current = Membership::NoSp;
    Membership best = Membership::NoSp;
    double current_payoff = 0.0;
    double best_payoff = 0.0;
};

struct VerificationReport {
    MarketState state;
    double epsilon = 0.0;
    std::vector<Deviation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Lists every user whose payoff is more than epsilon below their best alternative.
VerificationReport verify_equilibrium(const Population& population,
                                      const MembershipAssignment& assignment, const Budgets& budgets,
                                      const ModelParams& params, const ZipfCatalog& catalog,
                                      double epsilon);

} // namespace edgesp
