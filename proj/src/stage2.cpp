#include "edgesp/stage2.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "edgesp/simd/kernels.hpp"

namespace edgesp {

namespace {

std::uint64_t hash_labels(const std::vector<Membership>& labels) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto m : labels) {
        h ^= static_cast<std::uint8_t>(m);
        h *= 0x100000001b3ull;
    }
    return h;
}

simd::TypeView view_of(const Population& population) {
    return {population.f().data(), population.r().data(), nullptr, population.size()};
}

void check_sizes(const Population& population, const MembershipAssignment& assignment) {
    if (assignment.size() != population.size()) {
        throw std::invalid_argument("assignment has " + std::to_string(assignment.size()) +
                                    " labels for " + std::to_string(population.size()) + " users");
    }
}

// Contribution of one user to (n_c, n_e).
std::array<double, 2> contribution(UserType t, Membership m, double rho) {
    const double edge = t.f * t.r * rho;
    switch (m) {
    case Membership::CellSp: return {t.f, 0.0};
    case Membership::EdgeSp: return {0.0, edge};
    case Membership::HybridSp: return {t.f - edge, edge};
    case Membership::NoSp: break;
    }
    return {0.0, 0.0};
}

FixedPointResult bisect(const simd::TypeView& types, double total_mass, const Budgets& budgets,
                        const ModelParams& params, const ZipfCatalog& catalog) {
    FixedPointResult out;
    out.rho = cache_hit_prob(catalog, budgets.alpha2);

    const auto gap = [&](double p) {
        const auto totals = classify_at(types, p, out.rho, params);
        return p - sponsor_prob(budgets.alpha1, std::max(totals.n_c, 0.0));
    };

    double lo = 0.0;
    double hi = 1.0;
    if (gap(hi) <= 0.0) {
        out.p_star = 1.0;
        out.bracketed = false;
    } else if (gap(lo) >= 0.0) {
        out.p_star = 0.0;
        out.bracketed = false;
    } else {
        while (out.steps < 200) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            ++out.steps;
            if (gap(mid) > 0.0) hi = mid;
            else lo = mid;
        }
        out.p_star = 0.5 * (lo + hi);
    }

    const auto totals = classify_at(types, out.p_star, out.rho, params);
    out.n_c = std::max(totals.n_c, 0.0);
    out.n_e = totals.n_e;
    for (std::size_t k = 0; k < 4; ++k) out.mu[k] = totals.mass[k] / total_mass;
    return out;
}

} // namespace

Membership own_impact_best_response(UserType user, Membership current, double n_c,
                                    const Budgets& budgets, double rho, const ModelParams& params) {
    const double others = n_c - contribution(user, current, rho)[0];
    std::array<double, 4> v{};
    for (auto m : kAllMemberships) {
        const double load = std::max(others + contribution(user, m, rho)[0], 0.0);
        const auto state = make_state(rho, {load, 0.0}, sponsor_prob(budgets.alpha1, load), params);
        v[index_of(m)] = user_payoff(user, m, state, params);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < 4; ++k) {
        if (v[k] > v[best]) best = k;
    }
    return static_cast<Membership>(best);
}

TraceRow make_trace_row(const MembershipAssignment& assignment, const MarketState& state) {
    return {assignment.mu, state.p, state.rho, state.n_c, state.n_e};
}

simd::ClassifyTotals classify_at(const simd::TypeView& types, double p, double rho,
                                 const ModelParams& params, Membership* labels) {
    const simd::PayoffCoefficients c{(params.v - params.c1) * p, (params.v - params.c2) * rho, rho,
                                     params.phi1, params.phi2};
    return simd::kernels().classify(types, c, labels);
}

StepResult best_response_step(const Population& population, const MembershipAssignment& assignment,
                              const Budgets& budgets, const ModelParams& params,
                              const ZipfCatalog& catalog) {
    check_sizes(population, assignment);
    StepResult out;
    out.state = market_state(population, assignment, budgets, params, catalog);
    out.assignment.labels.resize(population.size());
    simd::kernels().classify(view_of(population), coefficients(out.state, params),
                             out.assignment.labels.data());
    out.assignment.refresh_mu();
    return out;
}

EquilibriumResult solve_dynamics(const Population& population, const Budgets& budgets,
                                 const ModelParams& params, const ZipfCatalog& catalog,
                                 const MembershipAssignment& init, const DynamicsOptions& options) {
    check_sizes(population, init);
    const int max_iters = std::max(options.max_iters, 1);

    EquilibriumResult res;
    res.assignment = init;
    res.assignment.refresh_mu();
    res.state = market_state(population, res.assignment, budgets, params, catalog);
    res.initial = make_trace_row(res.assignment, res.state);

    std::unordered_set<std::uint64_t> seen{hash_labels(res.assignment.labels)};
    std::vector<Membership> next(population.size());
    const auto types = view_of(population);

    bool cycled = false;
    while (res.iterations < max_iters) {
        simd::kernels().classify(types, coefficients(res.state, params), next.data());
        const bool changed = next != res.assignment.labels;
        res.assignment.labels.swap(next);
        res.assignment.refresh_mu();
        res.state = market_state(population, res.assignment, budgets, params, catalog);
        res.trace.push_back(make_trace_row(res.assignment, res.state));
        ++res.iterations;
        if (!changed) {
            res.converged = true;
            return res;
        }
        if (!seen.insert(hash_labels(res.assignment.labels)).second) {
            cycled = true;
            break;
        }
    }
    if (!cycled) return res;

    res.cycle_broken = true;
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(options.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const double rho = res.state.rho;
    auto& labels = res.assignment.labels;
    std::uint64_t budget = static_cast<std::uint64_t>(population.size()) *
                           static_cast<std::uint64_t>(max_iters);

    for (int pass = 0; pass < max_iters && budget > 0; ++pass) {
        // Each pass starts from exact loads; a pass without changes is therefore exact too.
        double n_c = res.state.n_c;
        double n_e = res.state.n_e;
        std::size_t changes = 0;
        for (auto i : order) {
            if (budget == 0) break;
            --budget;
            const auto user = population[i];
            const auto m = own_impact_best_response(user, labels[i], n_c, budgets, rho, params);
            if (m == labels[i]) continue;
            const auto before = contribution(user, labels[i], rho);
            const auto after = contribution(user, m, rho);
            n_c += after[0] - before[0];
            n_e += after[1] - before[1];
            labels[i] = m;
            ++changes;
        }

        res.assignment.refresh_mu();
        res.state = market_state(population, res.assignment, budgets, params, catalog);
        res.trace.push_back(make_trace_row(res.assignment, res.state));
        ++res.iterations;
        if (changes == 0) {
            res.converged = true;
            break;
        }
    }
    return res;
}

EquilibriumResult solve_dynamics(const Population& population, const Budgets& budgets,
                                 const ModelParams& params, const ZipfCatalog& catalog,
                                 const DynamicsOptions& options) {
    return solve_dynamics(population, budgets, params, catalog,
                          MembershipAssignment::uniform(population.size(), Membership::NoSp), options);
}

FixedPointResult solve_fixedpoint(const Budgets& budgets, const ModelParams& params,
                                  const ZipfCatalog& catalog, const Population& population) {
    return bisect(view_of(population), static_cast<double>(population.size()), budgets, params,
                  catalog);
}

FixedPointResult solve_fixedpoint(const Budgets& budgets, const ModelParams& params,
                                  const ZipfCatalog& catalog, int grid_resolution) {
    if (grid_resolution < 100) {
        throw std::invalid_argument("solve_fixedpoint: grid_resolution must be >= 100");
    }
    const auto g = static_cast<std::size_t>(grid_resolution);
    const double cell_mass = static_cast<double>(params.U) / static_cast<double>(g * g);
    std::vector<double> f(g * g), r(g * g), w(g * g, cell_mass);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            f[i * g + j] = (static_cast<double>(i) + 0.5) / static_cast<double>(g);
            r[i * g + j] = (static_cast<double>(j) + 0.5) / static_cast<double>(g);
        }
    }
    const simd::TypeView types{f.data(), r.data(), w.data(), g * g};
    return bisect(types, static_cast<double>(params.U), budgets, params, catalog);
}

VerificationReport verify_equilibrium(const Population& population,
                                      const MembershipAssignment& assignment, const Budgets& budgets,
                                      const ModelParams& params, const ZipfCatalog& catalog,
                                      double epsilon) {
    check_sizes(population, assignment);
    VerificationReport report;
    report.epsilon = epsilon;
    report.state = market_state(population, assignment, budgets, params, catalog);
    for (std::size_t i = 0; i < population.size(); ++i) {
        const auto v = all_payoffs(population[i], report.state, params);
        const auto current = assignment.labels[i];
        std::size_t best = 0;
        for (std::size_t k = 1; k < 4; ++k) {
            if (v[k] > v[best]) best = k;
        }
        if (v[best] - v[index_of(current)] > epsilon) {
            report.violations.push_back(
                {i, current, static_cast<Membership>(best), v[index_of(current)], v[best]});
        }
    }
    return report;
}

} // namespace edgesp
