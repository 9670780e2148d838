// edgesp: Stage-II equilibria, Stage-I budget optimization and the experiment runner.
//
// Exit codes: 0 success, 1 I/O or configuration error, 2 oracle violation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgesp/harness.hpp"
#include "edgesp/simd/kernels.hpp"

namespace {

using namespace edgesp;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    int resolution = 50;
    std::string solver;
    std::string simd;
    int max_iters = 500;
};

SolverChoice solver_or(const GlobalOptions& g, SolverChoice fallback) {
    if (g.solver.empty()) return fallback;
    return g.solver == "fixedpoint" ? SolverChoice::FixedPoint : SolverChoice::Agents;
}

harness::ExperimentSpec make_spec(const GlobalOptions& g, harness::ExperimentKind kind,
                                  SolverChoice default_solver) {
    harness::ExperimentSpec spec;
    spec.kind = kind;
    if (!g.config_path.empty()) spec.config = load_config(g.config_path);
    if (g.seed) spec.config.population.seed = *g.seed;
    spec.output_dir = g.out_dir;
    spec.resolution = g.resolution;
    spec.solver = solver_or(g, default_solver);
    spec.dynamics.max_iters = g.max_iters;
    return spec;
}

void print_mu(const char* label, const MuVector& mu) {
    std::printf("%s mu_N=%.4f mu_C=%.4f mu_E=%.4f mu_H=%.4f\n", label, mu[0], mu[1], mu[2], mu[3]);
}

void print_revenue(const char* label, const Budgets& b, const RevenueBreakdown& r) {
    std::printf("%-14s alpha1=%.4g alpha2=%.4g  U_C=%.6g U_E=%.6g total=%.6g\n", label, b.alpha1,
                b.alpha2, r.u_c, r.u_e, r.total);
}

int run_equilibrium(const GlobalOptions& g) {
    auto spec = make_spec(g, harness::ExperimentKind::Dynamics, SolverChoice::Agents);
    const auto config = harness::effective_config(spec);
    const auto population = make_population(config);
    const auto catalog = build_catalog(config.params.S, config.params.gamma);
    if (spec.dynamics.seed == 0) spec.dynamics.seed = config.population.seed;
    const auto eq = harness::solve_equilibrium(config, population, catalog, spec.solver, spec.dynamics);

    print_mu(spec.solver == SolverChoice::Agents ? "agents:" : "fixedpoint:", eq.mu);
    std::printf("P=%.6f rho=%.6f N_C=%.6g N_E=%.6g delta1=%.6f delta2=%.6f\n", eq.state.p,
                eq.state.rho, eq.state.n_c, eq.state.n_e, eq.state.delta1, eq.state.delta2);
    std::printf("iterations=%d converged=%d cycle_broken=%d\n", eq.iterations, eq.converged,
                eq.cycle_broken);
    const auto rev = revenue_at(config.budgets, config.params, eq.state.p, eq.state.n_c, eq.state.n_e);
    print_revenue("revenue", config.budgets, rev);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge caching and cellular data sponsoring: equilibrium solver and experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "key = value parameter file");
    app.add_option("--seed", g.seed, "population seed (overrides the config)");
    app.add_option("--out", g.out_dir, "output directory for CSV artifacts");
    app.add_option("--resolution", g.resolution, "grid resolution (budget grid or type lattice)")
        ->check(CLI::PositiveNumber);
    app.add_option("--solver", g.solver, "Stage-II solver")
        ->check(CLI::IsMember({"agents", "fixedpoint"}));
    app.add_option("--simd", g.simd, "kernel backend")->check(CLI::IsMember({"scalar", "avx2"}));
    app.add_option("--max-iters", g.max_iters, "dynamics round limit")->check(CLI::PositiveNumber);

    auto* equilibrium = app.add_subcommand("equilibrium", "Stage-II equilibrium at the configured budgets");
    auto* optimize = app.add_subcommand("optimize", "Stage-I budget optimization (contour, curves, intersections)");

    auto* sweep = app.add_subcommand("sweep", "membership fractions across a parameter sweep");
    harness::SweepSpec sw;
    sweep->add_option("--param", sw.param, "parameter name (v, c1, c2, phi, u, gamma, alpha1, ...)")->required();
    sweep->add_option("--start", sw.start)->required();
    sweep->add_option("--stop", sw.stop)->required();
    sweep->add_option("--steps", sw.steps)->required()->check(CLI::Range(2, 100000));

    auto* dynamics = app.add_subcommand("dynamics", "membership trace of the best-response dynamics");
    bool calibrate = false;
    dynamics->add_flag("--calibrate", calibrate, "also sweep gamma against the reference fractions");

    auto* region = app.add_subcommand("region-map", "membership of a type lattice at equilibrium");

    auto* compare = app.add_subcommand("compare", "joint vs pure-cellular vs pure-edge optimum");
    std::vector<double> extra_u;
    compare->add_option("--u-values", extra_u, "additional u values to compare")->delimiter(',');

    auto* oracle = app.add_subcommand("oracle", "brute-force equilibrium checks on small populations");
    harness::OracleOptions oracle_opts;
    oracle->add_option("--runs", oracle_opts.runs)->check(CLI::PositiveNumber);
    oracle->add_option("--epsilon", oracle_opts.epsilon)->check(CLI::NonNegativeNumber);
    oracle->add_flag("--corrupt-one-label", oracle_opts.corrupt_one_label,
                     "negative control: flip one label per run before checking");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!g.simd.empty()) simd::set_active_backend(*simd::parse_backend(g.simd));

        if (*equilibrium) return run_equilibrium(g);

        if (*optimize) {
            const auto spec = make_spec(g, harness::ExperimentKind::Contour, SolverChoice::FixedPoint);
            const auto rep = harness::run_contour(spec);
            print_revenue("grid optimum", rep.grid_best.budgets, rep.grid_best.revenue);
            print_revenue("best", rep.best.budgets, rep.best.revenue);
            if (rep.best_agents) print_revenue("best (agents)", rep.best.budgets, *rep.best_agents);
            std::printf("intersections=%zu grid-optimum distance to nearest=%.3g steps\n",
                        rep.intersections.size(), rep.grid_best_to_intersection_steps());
            return 0;
        }
        if (*sweep) {
            auto spec = make_spec(g, harness::ExperimentKind::Sweep, SolverChoice::Agents);
            spec.sweep = sw;
            for (const auto& row : harness::run_sweep(spec)) {
                std::printf("%s=%.6g ", sw.param.c_str(), row.value);
                print_mu("", row.mu);
            }
            return 0;
        }
        if (*dynamics) {
            const auto spec = make_spec(g, harness::ExperimentKind::Dynamics, SolverChoice::Agents);
            const auto res = harness::run_dynamics(spec);
            std::printf("iterations=%d converged=%d cycle_broken=%d\n", res.iterations, res.converged,
                        res.cycle_broken);
            print_mu("equilibrium", res.assignment.mu);
            if (calibrate) {
                const auto cal = harness::run_calibration(spec);
                for (const auto& r : cal.rows) {
                    std::printf("gamma=%.2f distance=%.4f ", r.gamma, r.distance);
                    print_mu("", r.mu);
                }
                std::printf("best gamma=%.2f distance=%.4f (target within %.2f: %s)\n",
                            cal.rows[cal.best].gamma, cal.rows[cal.best].distance,
                            harness::kCalibrationTolerance, cal.within_tolerance() ? "yes" : "no");
            }
            return 0;
        }
        if (*region) {
            const auto spec = make_spec(g, harness::ExperimentKind::RegionMap, SolverChoice::Agents);
            const auto map = harness::run_region_map(spec);
            std::printf("delta1=%.6f delta2=%.6f rho=%.6f\n", map.state.delta1, map.state.delta2,
                        map.state.rho);
            if (map.points.n1) {
                std::printf("N1=(%.6f, %.6f) in_domain=%d\n", map.points.n1->f, map.points.n1->r,
                            map.points.n1_in_domain);
            }
            if (map.points.n2) {
                std::printf("N2=(%.6f, %.6f) in_domain=%d\n", map.points.n2->f, map.points.n2->r,
                            map.points.n2_in_domain);
            }
            return 0;
        }
        if (*compare) {
            const auto spec = make_spec(g, harness::ExperimentKind::Compare, SolverChoice::FixedPoint);
            for (const auto& run : harness::run_compare(spec, extra_u)) {
                std::printf("u=%.4g\n", run.u);
                print_revenue("  joint", run.result.joint.budgets, run.result.joint.revenue);
                print_revenue("  cellular", run.result.pure_cellular.budgets, run.result.pure_cellular.revenue);
                print_revenue("  edge", run.result.pure_edge.budgets, run.result.pure_edge.revenue);
                if (run.result.gain_vs_cellular) std::printf("  gain vs cellular: %.1f%%\n", 100 * *run.result.gain_vs_cellular);
                else std::printf("  gain vs cellular: undefined\n");
                if (run.result.gain_vs_edge) std::printf("  gain vs edge: %.1f%%\n", 100 * *run.result.gain_vs_edge);
                else std::printf("  gain vs edge: undefined\n");
            }
            return 0;
        }
        if (*oracle) {
            auto spec = make_spec(g, harness::ExperimentKind::Oracle, SolverChoice::Agents);
            if (g.config_path.empty()) spec.overrides["U"] = 100;
            const auto rep = harness::run_oracle(spec, oracle_opts);
            std::printf("runs=%d converged=%d max_fixedpoint_gap=%.4g violations=%zu\n", rep.runs,
                        rep.converged_runs, rep.max_mu_gap, rep.violations.size());
            for (const auto& v : rep.violations) {
                std::printf("  run %d seed %llu [%s] %s\n", v.run, static_cast<unsigned long long>(v.seed),
                            v.check.c_str(), v.detail.c_str());
            }
            return rep.ok() ? 0 : 2;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
