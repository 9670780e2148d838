#include "edgesp/harness.hpp"

#include <cmath>
#include <concepts>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "edgesp/parallel.hpp"

namespace edgesp::harness {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

class CsvFile {
  public:
    CsvFile(const std::filesystem::path& dir, const std::string& name, const std::string& header) {
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        path_ = dir / name;
        out_.open(path_, std::ios::out | std::ios::trunc);
        if (!out_) throw std::runtime_error("cannot write '" + path_.string() + "'");
        out_ << header << '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        if (!out_.is_open()) return;
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
        if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
    }

  private:
    static std::string cell(double x) { return num(x); }
    template <std::integral Int>
        requires(!std::same_as<Int, bool> && !std::same_as<Int, char>)
    static std::string cell(Int x) { return std::to_string(x); }
    static std::string cell(bool x) { return x ? "1" : "0"; }
    static std::string cell(char x) { return std::string(1, x); }
    static std::string cell(const std::string& x) { return x; }
    static std::string cell(const char* x) { return x; }

    std::filesystem::path path_;
    std::ofstream out_;
};

std::int64_t as_count(const std::string& name, double value) {
    if (std::floor(value) != value || std::abs(value) > 9e15) {
        throw ConfigError(name, name + " must be an integer, got " + num(value));
    }
    return static_cast<std::int64_t>(value);
}

DynamicsOptions seeded(DynamicsOptions d, const Config& config) {
    if (d.seed == 0) d.seed = config.population.seed;
    return d;
}

} // namespace

void set_parameter(Config& c, const std::string& name, double value) {
    auto& p = c.params;
    auto& b = c.budgets;
    if (name == "v") p.v = value;
    else if (name == "c1") p.c1 = value;
    else if (name == "c2") p.c2 = value;
    else if (name == "phi1") p.phi1 = value;
    else if (name == "phi2") p.phi2 = value;
    else if (name == "phi") p.phi1 = p.phi2 = value;
    else if (name == "u") p.u = value;
    else if (name == "h1") p.h1 = value;
    else if (name == "h2") p.h2 = value;
    else if (name == "gamma") p.gamma = value;
    else if (name == "alpha_min") p.alpha_min = value;
    else if (name == "alpha_max") p.alpha_max = value;
    else if (name == "alpha1") b.alpha1 = value;
    else if (name == "alpha2") b.alpha2 = value;
    else if (name == "S") p.S = as_count(name, value);
    else if (name == "U") p.U = as_count(name, value);
    else throw ConfigError(name, "unknown parameter '" + name + "'");
}

Config effective_config(const ExperimentSpec& spec) {
    Config c = spec.config;
    for (const auto& [name, value] : spec.overrides) set_parameter(c, name, value);
    validate(c.params);
    validate(c.budgets, c.params);
    return c;
}

void validate(const ExperimentSpec& spec) {
    if (spec.kind != ExperimentKind::Sweep) return;
    if (!spec.sweep) throw std::invalid_argument("sweep experiment needs a sweep (param, start, stop, steps)");
    if (spec.sweep->steps < 2) throw std::invalid_argument("sweep needs steps >= 2");
    if (spec.sweep->param == "S" || spec.sweep->param == "U") {
        throw std::invalid_argument("sweep: S and U change the population and cannot be swept");
    }
}

Equilibrium solve_equilibrium(const Config& config, const Population& population,
                              const ZipfCatalog& catalog, SolverChoice solver,
                              const DynamicsOptions& dynamics) {
    Equilibrium out;
    if (solver == SolverChoice::FixedPoint) {
        const auto fp = solve_fixedpoint(config.budgets, config.params, catalog, population);
        out.state = make_state(fp.rho, {fp.n_c, fp.n_e}, fp.p_star, config.params);
        out.mu = fp.mu;
        out.iterations = fp.steps;
        return out;
    }
    const auto eq = solve_dynamics(population, config.budgets, config.params, catalog,
                                   seeded(dynamics, config));
    out.state = eq.state;
    out.mu = eq.assignment.mu;
    out.iterations = eq.iterations;
    out.converged = eq.converged;
    out.cycle_broken = eq.cycle_broken;
    return out;
}

RegionMap run_region_map(const ExperimentSpec& spec) {
    const auto config = effective_config(spec);
    const auto population = make_population(config);
    const auto catalog = build_catalog(config.params.S, config.params.gamma);
    const auto eq = solve_equilibrium(config, population, catalog, spec.solver, spec.dynamics);

    RegionMap map;
    map.state = eq.state;
    map.grid = std::max(spec.resolution, 2);
    const auto g = static_cast<std::size_t>(map.grid);
    map.types.reserve(g * g);
    map.labels.reserve(g * g);

    CsvFile csv(spec.output_dir, "region_map.csv", "f,r,membership");
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            const TypePoint t{static_cast<double>(i) / static_cast<double>(g - 1),
                              static_cast<double>(j) / static_cast<double>(g - 1)};
            const auto m = best_membership({t.f, t.r}, map.state, config.params);
            map.types.push_back(t);
            map.labels.push_back(m);
            csv.row(t.f, t.r, to_char(m));
        }
    }

    const double phi = config.params.phi1;
    map.points = indifferent_points(map.state.delta1, map.state.delta2, map.state.rho, phi);
    CsvFile pts(spec.output_dir, "indifferent_points.csv", "point,present,f,r,in_domain");
    const auto emit = [&](const char* name, const std::optional<TypePoint>& p, bool in_domain) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        pts.row(name, p.has_value(), p ? p->f : nan, p ? p->r : nan, in_domain);
    };
    emit("N1", map.points.n1, map.points.n1_in_domain);
    emit("N2", map.points.n2, map.points.n2_in_domain);
    return map;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
    validate(spec);
    const auto base = effective_config(spec);
    const auto population = make_population(base);
    const auto& sw = *spec.sweep;
    const auto values = linspace(sw.start, sw.stop, sw.steps);

    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t k) {
        Config c = base;
        set_parameter(c, sw.param, values[k]);
        validate(c.params);
        validate(c.budgets, c.params);
        const auto catalog = build_catalog(c.params.S, c.params.gamma);
        const auto eq = solve_equilibrium(c, population, catalog, spec.solver, spec.dynamics);
        rows[k] = {values[k], eq.mu, eq.converged};
    });

    CsvFile csv(spec.output_dir, "sweep_" + sw.param + ".csv", "param,mu_N,mu_C,mu_E,mu_H");
    for (const auto& r : rows) csv.row(r.value, r.mu[0], r.mu[1], r.mu[2], r.mu[3]);
    return rows;
}

EquilibriumResult run_dynamics(const ExperimentSpec& spec) {
    const auto config = effective_config(spec);
    const auto population = make_population(config);
    const auto catalog = build_catalog(config.params.S, config.params.gamma);
    auto res = solve_dynamics(population, config.budgets, config.params, catalog,
                              seeded(spec.dynamics, config));

    CsvFile csv(spec.output_dir, "dynamics.csv", "iter,mu_N,mu_C,mu_E,mu_H,P,rho,N_C,N_E");
    const auto emit = [&](int iter, const TraceRow& t) {
        csv.row(iter, t.mu[0], t.mu[1], t.mu[2], t.mu[3], t.p, t.rho, t.n_c, t.n_e);
    };
    emit(0, res.initial);
    for (std::size_t k = 0; k < res.trace.size(); ++k) emit(static_cast<int>(k + 1), res.trace[k]);
    return res;
}

Calibration run_calibration(const ExperimentSpec& spec) {
    const auto base = effective_config(spec);
    const auto population = make_population(base);
    const std::vector<double> gammas = {0.6, 0.8, 1.0, 1.2};

    Calibration cal;
    cal.rows.resize(gammas.size());
    parallel_for(gammas.size(), [&](std::size_t k) {
        Config c = base;
        c.params.gamma = gammas[k];
        const auto catalog = build_catalog(c.params.S, c.params.gamma);
        const auto eq = solve_dynamics(population, c.budgets, c.params, catalog,
                                       seeded(spec.dynamics, c));
        cal.rows[k] = {gammas[k], eq.assignment.mu, mu_distance(eq.assignment.mu, kReferenceMu),
                       eq.iterations, eq.converged};
    });
    for (std::size_t k = 1; k < cal.rows.size(); ++k) {
        if (cal.rows[k].distance < cal.rows[cal.best].distance) cal.best = k;
    }

    CsvFile csv(spec.output_dir, "calibration.csv",
                "gamma,mu_N,mu_C,mu_E,mu_H,max_abs_diff,iterations,converged,best");
    for (std::size_t k = 0; k < cal.rows.size(); ++k) {
        const auto& r = cal.rows[k];
        csv.row(r.gamma, r.mu[0], r.mu[1], r.mu[2], r.mu[3], r.distance, r.iterations, r.converged,
                k == cal.best);
    }
    return cal;
}

OptimizationReport run_contour(const ExperimentSpec& spec) {
    const auto config = effective_config(spec);
    const auto population = make_population(config);
    const auto catalog = build_catalog(config.params.S, config.params.gamma);
    const RevenueModel model(config.params, catalog, population, spec.solver,
                             seeded(spec.dynamics, config));
    OptimizeOptions opts;
    opts.resolution = spec.resolution;
    opts.reevaluate_with_agents = spec.solver == SolverChoice::FixedPoint;
    auto rep = optimize_budgets(model, opts);

    CsvFile contour(spec.output_dir, "contour.csv", "alpha1,alpha2,u_c,u_e,total");
    for (std::size_t i = 0; i < rep.alpha1_axis.size(); ++i) {
        for (std::size_t j = 0; j < rep.alpha2_axis.size(); ++j) {
            const auto& r = rep.at(i, j);
            contour.row(rep.alpha1_axis[i], rep.alpha2_axis[j], r.u_c, r.u_e, r.total);
        }
    }

    CsvFile curves(spec.output_dir, "curves.csv", "curve,given,best");
    for (std::size_t k = 0; k < rep.curve_a1.x.size(); ++k) {
        curves.row("alpha1_given_alpha2", rep.curve_a1.x[k], rep.curve_a1.y[k]);
    }
    for (std::size_t k = 0; k < rep.curve_a2.x.size(); ++k) {
        curves.row("alpha2_given_alpha1", rep.curve_a2.x[k], rep.curve_a2.y[k]);
    }

    CsvFile inter(spec.output_dir, "intersections.csv", "alpha1,alpha2,total");
    for (const auto& x : rep.intersections) inter.row(x.budgets.alpha1, x.budgets.alpha2, x.revenue.total);

    const double a1_span = config.params.alpha_max;
    const double a2_span = config.params.alpha2_upper();
    const double steps = rep.grid_best_to_intersection_steps();
    CsvFile opt(spec.output_dir, "optimum.csv",
                "source,alpha1,alpha2,alpha1_norm,alpha2_norm,u_c,u_e,total,P,N_C,N_E,"
                "intersection_distance_steps");
    const auto emit = [&](const char* source, const Budgets& b, const RevenueBreakdown& r) {
        opt.row(source, b.alpha1, b.alpha2, a1_span > 0 ? b.alpha1 / a1_span : 0.0,
                a2_span > 0 ? b.alpha2 / a2_span : 0.0, r.u_c, r.u_e, r.total, r.p, r.n_c, r.n_e, steps);
    };
    emit("grid", rep.grid_best.budgets, rep.grid_best.revenue);
    emit("best", rep.best.budgets, rep.best.revenue);
    if (rep.best_agents) emit("best_agents", rep.best.budgets, *rep.best_agents);

    if (!(steps <= 1.0)) {
        CsvFile ce(spec.output_dir, "intersection_counterexample.csv",
                   "grid_alpha1,grid_alpha2,grid_total,nearest_steps,intersections");
        ce.row(rep.grid_best.budgets.alpha1, rep.grid_best.budgets.alpha2, rep.grid_best.revenue.total,
               steps, rep.intersections.size());
    }
    return rep;
}

std::vector<CompareRun> run_compare(const ExperimentSpec& spec, const std::vector<double>& extra_u) {
    const auto base = effective_config(spec);
    const auto population = make_population(base);
    const auto catalog = build_catalog(base.params.S, base.params.gamma);

    std::vector<double> us = {base.params.u};
    us.insert(us.end(), extra_u.begin(), extra_u.end());

    std::vector<CompareRun> runs(us.size());
    for (std::size_t k = 0; k < us.size(); ++k) {
        Config c = base;
        c.params.u = us[k];
        validate(c.params);
        const RevenueModel model(c.params, catalog, population, spec.solver,
                                 seeded(spec.dynamics, c));
        runs[k] = {us[k], compare_schemes(model, spec.resolution)};
    }

    const auto& head = runs.front().result;
    CsvFile csv(spec.output_dir, "compare.csv", "scheme,alpha1,alpha2,total");
    csv.row("joint", head.joint.budgets.alpha1, head.joint.budgets.alpha2, head.joint.revenue.total);
    csv.row("pure_cellular", head.pure_cellular.budgets.alpha1, head.pure_cellular.budgets.alpha2,
            head.pure_cellular.revenue.total);
    csv.row("pure_edge", head.pure_edge.budgets.alpha1, head.pure_edge.budgets.alpha2,
            head.pure_edge.revenue.total);

    CsvFile gains(spec.output_dir, "gains.csv", "u,gain_vs_cellular,gain_vs_edge");
    const auto opt_num = [](const std::optional<double>& g) { return g ? num(*g) : std::string("undefined"); };
    for (const auto& r : runs) {
        gains.row(r.u, opt_num(r.result.gain_vs_cellular), opt_num(r.result.gain_vs_edge));
    }

    if (!extra_u.empty()) {
        CsvFile sweep(spec.output_dir, "compare_u.csv", "u,scheme,alpha1,alpha2,total");
        for (const auto& r : runs) {
            const auto& s = r.result;
            sweep.row(r.u, "joint", s.joint.budgets.alpha1, s.joint.budgets.alpha2, s.joint.revenue.total);
            sweep.row(r.u, "pure_cellular", s.pure_cellular.budgets.alpha1,
                      s.pure_cellular.budgets.alpha2, s.pure_cellular.revenue.total);
            sweep.row(r.u, "pure_edge", s.pure_edge.budgets.alpha1, s.pure_edge.budgets.alpha2,
                      s.pure_edge.revenue.total);
        }
    }
    return runs;
}

OracleReport run_oracle(const ExperimentSpec& spec, const OracleOptions& options) {
    const auto config = effective_config(spec);
    const auto& params = config.params;
    if (params.U > 500) throw std::invalid_argument("oracle: U must be <= 500");
    const auto catalog = build_catalog(params.S, params.gamma);
    const bool common_phi = params.phi1 == params.phi2;

    struct RunOutcome {
        std::uint64_t seed = 0;
        EquilibriumResult eq;
        double mu_gap = 0.0;
        std::vector<OracleViolation> violations;
    };
    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(std::max(options.runs, 0)));

    parallel_for(outcomes.size(), [&](std::size_t k) {
        auto& out = outcomes[k];
        const int run = static_cast<int>(k);
        out.seed = config.population.seed + k;
        const auto population = sample_population(params, out.seed);
        DynamicsOptions dyn = spec.dynamics;
        dyn.seed = out.seed;
        out.eq = solve_dynamics(population, config.budgets, params, catalog, dyn);
        const auto flag = [&](const char* check, const std::string& detail) {
            out.violations.push_back({run, out.seed, check, detail});
        };

        auto assignment = out.eq.assignment;
        if (!out.eq.converged) flag("convergence", "no fixed point within the iteration budget");

        if (options.corrupt_one_label && population.size() > 0) {
            const auto state = market_state(population, assignment, config.budgets, params, catalog);
            const auto v = all_payoffs(population[0], state, params);
            std::size_t worst = 0;
            for (std::size_t m = 1; m < 4; ++m) {
                if (v[m] < v[worst]) worst = m;
            }
            if (static_cast<Membership>(worst) == assignment.labels[0]) worst = (worst + 1) % 4;
            assignment.labels[0] = static_cast<Membership>(worst);
            assignment.refresh_mu();
        }

        // Every unilateral deviation, evaluated from scratch.
        const auto state = market_state(population, assignment, config.budgets, params, catalog);
        for (std::size_t i = 0; i < population.size(); ++i) {
            const auto current = assignment.labels[i];
            const double own = user_payoff(population[i], current, state, params);
            for (auto m : kAllMemberships) {
                if (m == current) continue;
                const double alt = user_payoff(population[i], m, state, params);
                if (alt > own + options.epsilon) {
                    std::ostringstream os;
                    os << "user " << i << ": " << to_char(current) << " -> " << to_char(m) << " gains "
                       << num(alt - own);
                    flag("deviation", os.str());
                }
            }
        }

        const auto step = best_response_step(population, assignment, config.budgets, params, catalog);
        std::size_t moved = 0;
        for (std::size_t i = 0; i < population.size(); ++i) moved += step.assignment.labels[i] != assignment.labels[i];
        if (moved > 0) flag("fixed_point", std::to_string(moved) + " labels change in one more round");

        if (common_phi) {
            for (std::size_t i = 0; i < population.size(); ++i) {
                const auto v = all_payoffs(population[i], state, params);
                bool boundary = false;
                for (std::size_t a = 0; a < 4 && !boundary; ++a) {
                    for (std::size_t b = a + 1; b < 4; ++b) {
                        if (std::abs(v[a] - v[b]) < 1e-9) boundary = true;
                    }
                }
                if (boundary) continue;
                const auto region = classify_region(population[i], state, params);
                const auto argmax = best_membership(population[i], state, params);
                if (region != argmax) {
                    flag("regions", "user " + std::to_string(i) + ": region " + to_char(region) +
                                        " vs argmax " + to_char(argmax));
                }
            }
        }

        const auto fp = solve_fixedpoint(config.budgets, params, catalog, population);
        out.mu_gap = mu_distance(fp.mu, out.eq.assignment.mu);
        if (out.mu_gap > options.mu_tolerance) {
            flag("solvers", "agent vs fixed-point mu differ by " + num(out.mu_gap));
        }
    });

    OracleReport report;
    report.runs = static_cast<int>(outcomes.size());
    CsvFile csv(spec.output_dir, "oracle.csv",
                "run,seed,iterations,converged,cycle_broken,mu_N,mu_C,mu_E,mu_H,fixedpoint_gap,violations");
    CsvFile bad(spec.output_dir, "oracle_violations.csv", "run,seed,check,detail");
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        report.converged_runs += o.eq.converged;
        report.max_mu_gap = std::max(report.max_mu_gap, o.mu_gap);
        const auto& mu = o.eq.assignment.mu;
        csv.row(static_cast<int>(k), o.seed, o.eq.iterations, o.eq.converged, o.eq.cycle_broken, mu[0],
                mu[1], mu[2], mu[3], o.mu_gap, o.violations.size());
        for (const auto& v : o.violations) {
            bad.row(v.run, v.seed, v.check, v.detail);
            report.violations.push_back(v);
        }
    }
    return report;
}

} // namespace edgesp::harness
