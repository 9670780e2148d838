// Acceptance suite: one PASS/FAIL line per criterion, artifacts under --out.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "edgesp/harness.hpp"
#include "support.hpp"

using namespace edgesp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Clock {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string mu_text(const MuVector& mu) {
    return fmt("(%.4f, %.4f, %.4f, %.4f)", mu[0], mu[1], mu[2], mu[3]);
}

// Deviation check from scratch: rho from a direct Zipf sum, P from the raw loads,
// payoffs from the request-count formulas.
int independent_deviations(const Population& pop, const std::vector<Membership>& labels,
                           const Budgets& b, const ModelParams& k, double eps) {
    const auto pmf = testing::oracle_zipf(static_cast<int>(k.S), k.gamma);
    double rho = 0.0;
    for (int s = 0; s < static_cast<int>(b.alpha2); ++s) rho += pmf[s];
    rho = std::min(rho, 1.0);
    double n_c = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto t = pop[i];
        if (labels[i] == Membership::CellSp) n_c += t.f;
        if (labels[i] == Membership::HybridSp) n_c += t.f - t.f * t.r * rho;
    }
    const double p = n_c > 0 ? std::min(b.alpha1 / n_c, 1.0) : (b.alpha1 > 0 ? 1.0 : 0.0);
    int bad = 0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto v = testing::oracle_payoffs(pop[i].f, pop[i].r, {p, rho}, k);
        for (int m = 0; m < 4; ++m) {
            if (v[m] > v[index_of(labels[i])] + eps) {
                ++bad;
                break;
            }
        }
    }
    return bad;
}

struct Context {
    fs::path out;
    ModelParams params;
    Budgets budgets;
    Population population; // default U, seed 42
    ZipfCatalog catalog{1, 1.0};
    EquilibriumResult default_eq;
};

Outcome criterion_1_2(const Context& ctx, bool fixed_point_only) {
    Clock clock;
    ModelParams k = ctx.params;
    k.U = 100;
    int converged = 0, violations = 0, moved_runs = 0;
    for (std::uint64_t seed = 42; seed < 62; ++seed) {
        const auto pop = sample_population(k, seed);
        const auto eq = solve_dynamics(pop, ctx.budgets, k, ctx.catalog, {500, seed});
        converged += eq.converged;
        violations += independent_deviations(pop, eq.assignment.labels, ctx.budgets, k, 1e-9);
        violations += static_cast<int>(verify_equilibrium(pop, eq.assignment, ctx.budgets, k, ctx.catalog, 1e-9).violations.size());
        const auto step = best_response_step(pop, eq.assignment, ctx.budgets, k, ctx.catalog);
        moved_runs += !(step.assignment == eq.assignment);
    }

    harness::ExperimentSpec spec;
    spec.kind = harness::ExperimentKind::Oracle;
    spec.overrides["U"] = 100;
    spec.output_dir = ctx.out / "oracle";
    harness::OracleOptions opts;
    opts.runs = 20;
    const auto rep = harness::run_oracle(spec, opts);
    const double t = clock.seconds();

    if (fixed_point_only) {
        return {moved_runs == 0 && rep.ok(),
                fmt("%d of 20 converged runs change under one more round", moved_runs)};
    }
    const bool pass = converged == 20 && violations == 0 && rep.ok() && t < 10.0;
    return {pass, fmt("20 populations, U=100: %d converged, %d deviation violations (eps=1e-9), "
                      "oracle report %zu violations, %.2f s (limit 10 s)",
                      converged, violations, rep.violations.size(), t)};
}

Outcome criterion_3(const Context& ctx) {
    Clock clock;
    std::mt19937_64 rng(2024);
    std::vector<MuVector> mus;
    int converged = 0;
    for (int run = 0; run < 10; ++run) {
        std::vector<Membership> init(ctx.population.size());
        for (auto& m : init) m = static_cast<Membership>(rng() % 4);
        const auto eq = solve_dynamics(ctx.population, ctx.budgets, ctx.params, ctx.catalog,
                                       MembershipAssignment(init), {500, 1000u + run});
        converged += eq.converged;
        mus.push_back(eq.assignment.mu);
    }
    double worst = 0.0;
    for (const auto& a : mus) {
        for (const auto& b : mus) worst = std::max(worst, mu_distance(a, b));
    }
    const double t = clock.seconds();
    return {worst <= 1e-3 && t < 30.0,
            fmt("10 random starts, U=10000: max pairwise mu gap %.2e (limit 1e-3), %d converged, %.2f s (limit 30 s)",
                worst, converged, t)};
}

Outcome criterion_4(const Context& ctx) {
    const auto fp = solve_fixedpoint(ctx.budgets, ctx.params, ctx.catalog, ctx.population);
    const double gap = mu_distance(fp.mu, ctx.default_eq.assignment.mu);
    return {gap <= 0.02, fmt("agents %s vs fixed point %s: gap %.4f (limit 0.02), P %.6f vs %.6f",
                              mu_text(ctx.default_eq.assignment.mu).c_str(), mu_text(fp.mu).c_str(), gap,
                              ctx.default_eq.state.p, fp.p_star)};
}

Outcome criterion_5(const Context&) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int mismatches = 0, compared = 0;
    for (int n = 0; n < 100000; ++n) {
        ModelParams k;
        k.v = 1.0 + 3.0 * u(rng);
        k.c1 = 2.0 * u(rng);
        k.c2 = 2.0 * u(rng);
        k.phi1 = k.phi2 = 0.3 * u(rng);
        const auto s = make_state(u(rng), {}, u(rng), k);
        const UserType t{u(rng), u(rng)};
        const auto v = all_payoffs(t, s, k);
        worst = std::max(worst, std::abs(v[3] - (v[1] + v[2] - s.delta1 * s.rho * t.f * t.r)));

        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        if (sorted[3] - sorted[2] <= 1e-9) continue;
        ++compared;
        mismatches += classify_region(t, s, k) != best_membership(t, s, k);
    }
    return {worst <= 1e-12 && mismatches == 0 && compared > 99000,
            fmt("identity max error %.2e (limit 1e-12); regions vs argmax: %d mismatches in %d off-boundary samples",
                worst, mismatches, compared)};
}

Outcome criterion_6(const Context& ctx) {
    harness::ExperimentSpec spec;
    spec.kind = harness::ExperimentKind::Sweep;
    spec.output_dir = ctx.out / "sweeps";
    spec.sweep = harness::SweepSpec{"v", 2.0, 4.0, 9};
    const auto v_rows = harness::run_sweep(spec);
    spec.sweep = harness::SweepSpec{"c1", 1.0, 3.5, 11};
    const auto c_rows = harness::run_sweep(spec);

    int v_breaks = 0, c_breaks = 0, c_nonzero = 0;
    for (std::size_t k = 1; k < v_rows.size(); ++k) {
        v_breaks += v_rows[k].mu[3] < v_rows[k - 1].mu[3];
        v_breaks += v_rows[k].mu[0] > v_rows[k - 1].mu[0];
    }
    for (std::size_t k = 0; k < c_rows.size(); ++k) {
        if (k > 0) c_breaks += c_rows[k].mu[1] > c_rows[k - 1].mu[1];
        if (c_rows[k].value >= 3.0 - 1e-12) c_nonzero += c_rows[k].mu[1] != 0.0;
    }
    return {v_breaks == 0 && c_breaks == 0 && c_nonzero == 0,
            fmt("v in [2,4] x9: %d monotonicity breaks (mu_H %.4f -> %.4f, mu_N %.4f -> %.4f); "
                "c1 in [1,3.5] x11: %d breaks, %d points with c1 >= 3 and mu_C > 0",
                v_breaks, v_rows.front().mu[3], v_rows.back().mu[3], v_rows.front().mu[0],
                v_rows.back().mu[0], c_breaks, c_nonzero)};
}

Outcome criterion_7(const Context& ctx) {
    harness::ExperimentSpec spec;
    spec.kind = harness::ExperimentKind::Dynamics;
    spec.output_dir = ctx.out / "dynamics";
    const auto res = harness::run_dynamics(spec);
    const auto cal = harness::run_calibration(spec);
    const auto& best = cal.rows[cal.best];
    std::printf("  calibration: best gamma %.2f, mu %s, distance %.4f to the reference %s (target 0.08: %s)\n",
                best.gamma, mu_text(best.mu).c_str(), best.distance, mu_text(harness::kReferenceMu).c_str(),
                cal.within_tolerance() ? "met" : "not met");
    return {res.converged && res.iterations <= 50,
            fmt("converged=%d in %d rounds (limit 50), cycle_broken=%d, mu %s", res.converged,
                res.iterations, res.cycle_broken, mu_text(res.assignment.mu).c_str())};
}

Outcome criterion_8(const Context& ctx) {
    struct Case {
        const char* name;
        std::map<std::string, double> overrides;
    };
    const std::vector<Case> cases = {
        {"defaults", {}},
        {"u=1", {{"u", 1.0}}},
        {"u=5", {{"u", 5.0}}},
        {"h1=0.5", {{"h1", 0.5}}},
        {"h2=5", {{"h2", 5.0}}},
        {"phi=0.3", {{"phi", 0.3}}},
        {"phi>v", {{"phi", 3.5}}},
        {"gamma=1.2", {{"gamma", 1.2}}},
    };
    int dominated = 0;
    bool strict_default = false;
    std::string gains;
    for (const auto& c : cases) {
        harness::ExperimentSpec spec;
        spec.kind = harness::ExperimentKind::Compare;
        spec.overrides = c.overrides;
        spec.solver = SolverChoice::FixedPoint;
        spec.resolution = 30;
        if (std::string(c.name) == "defaults") {
            spec.resolution = 50;
            spec.output_dir = ctx.out / "compare";
        }
        const auto r = harness::run_compare(spec).front().result;
        const double pure = std::max(r.pure_cellular.revenue.total, r.pure_edge.revenue.total);
        dominated += r.joint.revenue.total >= pure;
        if (std::string(c.name) == "defaults") {
            strict_default = r.joint.revenue.total > pure;
            gains = fmt("default gains: %+.1f%% vs cellular, %+.1f%% vs edge (reference 105%%/85%%, not gated)",
                        r.gain_vs_cellular ? 100 * *r.gain_vs_cellular : NAN,
                        r.gain_vs_edge ? 100 * *r.gain_vs_edge : NAN);
        }
    }
    return {dominated == static_cast<int>(cases.size()) && strict_default,
            fmt("joint >= both pure schemes on %d of %zu parameter sets, strict at defaults: %s; %s",
                dominated, cases.size(), strict_default ? "yes" : "no", gains.c_str())};
}

Outcome criterion_9(const Context& ctx) {
    Clock clock;
    harness::ExperimentSpec spec;
    spec.kind = harness::ExperimentKind::Contour;
    spec.solver = SolverChoice::FixedPoint;
    spec.resolution = 50;
    spec.output_dir = ctx.out / "contour";
    const auto rep = harness::run_contour(spec);
    const double steps = rep.grid_best_to_intersection_steps();
    const double t = clock.seconds();
    return {steps <= 1.0 && t < 300.0,
            fmt("grid optimum (%.1f, %.1f) revenue %.2f; %zu intersections, nearest %.3g steps away (limit 1); %.1f s (limit 300 s)",
                rep.grid_best.budgets.alpha1, rep.grid_best.budgets.alpha2, rep.grid_best.revenue.total,
                rep.intersections.size(), steps, t)};
}

Outcome criterion_10(const Context&) {
    double worst_sum = 0.0;
    double worst_full = 0.0;
    double empty = 0.0;
    for (std::int64_t S : {1, 10, 1000}) {
        for (double gamma : {0.6, 0.8, 1.0, 1.2}) {
            const ZipfCatalog z(S, gamma);
            double sum = 0.0;
            for (double g : z.pmf_values()) sum += g;
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
            worst_full = std::max(worst_full, std::abs(cache_hit_prob(z, static_cast<double>(S)) - 1.0));
            empty = std::max(empty, std::abs(cache_hit_prob(z, 0.0)));
        }
    }
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int out_of_range = 0;
    for (int n = 0; n < 100000; ++n) {
        const double a = 20000 * u(rng) * (n % 7 == 0 ? 0.0 : 1.0);
        const double d = 20000 * u(rng) * (n % 11 == 0 ? 0.0 : 1.0);
        const double p = sponsor_prob(a, d);
        out_of_range += !(p >= 0.0 && p <= 1.0);
    }
    return {worst_sum <= 1e-12 && worst_full <= 1e-12 && empty == 0.0 && out_of_range == 0,
            fmt("pmf sum error %.2e, |rho(S)-1| %.2e, rho(0) %.1g, P outside [0,1] in %d of 1e5 draws",
                worst_sum, worst_full, empty, out_of_range)};
}

} // namespace

int main(int argc, char** argv) {
    fs::path out = "acceptance_artifacts";
    for (int k = 1; k + 1 < argc; ++k) {
        if (std::string(argv[k]) == "--out") out = argv[k + 1];
    }
    fs::create_directories(out);

    Context ctx;
    ctx.out = out;
    ctx.catalog = build_catalog(ctx.params.S, ctx.params.gamma);
    ctx.population = sample_population(ctx.params, 42);
    ctx.default_eq = solve_dynamics(ctx.population, ctx.budgets, ctx.params, ctx.catalog, {500, 42});

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"equilibrium correctness", [&] { return criterion_1_2(ctx, false); }},
        {"fixed point", [&] { return criterion_1_2(ctx, true); }},
        {"uniqueness", [&] { return criterion_3(ctx); }},
        {"solver cross-validation", [&] { return criterion_4(ctx); }},
        {"payoff identity and regions", [&] { return criterion_5(ctx); }},
        {"sweep trends", [&] { return criterion_6(ctx); }},
        {"dynamics convergence", [&] { return criterion_7(ctx); }},
        {"scheme dominance", [&] { return criterion_8(ctx); }},
        {"intersection consistency", [&] { return criterion_9(ctx); }},
        {"derived-quantity units", [&] { return criterion_10(ctx); }},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %-28s %s  %s\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
