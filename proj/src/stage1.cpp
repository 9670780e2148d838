#include "edgesp/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "edgesp/parallel.hpp"

namespace edgesp {

RevenueBreakdown revenue_at(const Budgets& b, const ModelParams& params, double p, double n_c,
                            double n_e) {
    RevenueBreakdown out;
    out.p = p;
    out.n_c = n_c;
    out.n_e = n_e;
    out.u_c = params.u * p * n_c - b.alpha1 * params.h1;
    out.u_e = params.u * n_e - b.alpha2 * params.h2;
    out.total = out.u_c + out.u_e;
    return out;
}

RevenueBreakdown cp_revenue(const Budgets& budgets, const ModelParams& params,
                            const ZipfCatalog& catalog, const Population& population,
                            SolverChoice solver, const DynamicsOptions& dynamics) {
    if (budgets.alpha1 < 0 || budgets.alpha2 < 0) {
        throw std::invalid_argument("cp_revenue: budgets must be non-negative");
    }
    if (solver == SolverChoice::FixedPoint) {
        const auto fp = solve_fixedpoint(budgets, params, catalog, population);
        auto out = revenue_at(budgets, params, fp.p_star, fp.n_c, fp.n_e);
        out.mu = fp.mu;
        return out;
    }
    const auto eq = solve_dynamics(population, budgets, params, catalog, dynamics);
    auto out = revenue_at(budgets, params, eq.state.p, eq.state.n_c, eq.state.n_e);
    out.mu = eq.assignment.mu;
    out.converged = eq.converged;
    return out;
}

RevenueModel::RevenueModel(const ModelParams& params, const ZipfCatalog& catalog,
                           const Population& population, SolverChoice solver,
                           DynamicsOptions dynamics)
    : params_(params), catalog_(catalog), population_(population), solver_(solver),
      dynamics_(dynamics) {}

RevenueBreakdown RevenueModel::operator()(const Budgets& budgets) const {
    return cp_revenue(budgets, params_, catalog_, population_, solver_, dynamics_);
}

RevenueModel RevenueModel::with_solver(SolverChoice solver) const {
    return RevenueModel(params_, catalog_, population_, solver, dynamics_);
}

std::vector<double> RevenueModel::alpha1_axis(int resolution) const {
    return linspace(params_.alpha_min, params_.alpha_max, resolution);
}

std::vector<double> RevenueModel::alpha2_axis(int resolution) const {
    return linspace(params_.alpha_min, params_.alpha2_upper(), resolution);
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("linspace: need at least one point");
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = lo + k * step;
    out.back() = hi;
    return out;
}

std::size_t argmax_first(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("argmax_first: empty input");
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > values[best]) best = k;
    }
    return best;
}

OneDimOptimum best_budget_1d(const std::function<double(double)>& objective, double lo, double hi,
                             int resolution) {
    const auto xs = linspace(lo, hi, resolution);
    std::vector<double> ys(xs.size());
    parallel_for(xs.size(), [&](std::size_t k) { ys[k] = objective(xs[k]); });
    const auto k = argmax_first(ys);
    return {xs[k], ys[k]};
}

OneDimOptimum best_budget_1d(Axis fixed_axis, double fixed_value, const RevenueModel& model,
                             int resolution) {
    const auto& p = model.params();
    if (fixed_axis == Axis::Alpha2) {
        return best_budget_1d(
            [&](double a1) { return model(Budgets{a1, fixed_value}).total; }, p.alpha_min,
            p.alpha_max, resolution);
    }
    return best_budget_1d([&](double a2) { return model(Budgets{fixed_value, a2}).total; },
                          p.alpha_min, p.alpha2_upper(), resolution);
}

double SampledCurve::operator()(double at) const {
    if (x.empty()) throw std::logic_error("SampledCurve: no samples");
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin());
    const auto lo = hi - 1;
    if (at == x[lo]) return y[lo];
    const double t = (at - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + t * (y[hi] - y[lo]);
}

double SampledCurve::max_step() const {
    double step = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) step = std::max(step, x[k] - x[k - 1]);
    return step;
}

std::vector<Budgets> find_intersections(const SampledCurve& curve_a1, const SampledCurve& curve_a2) {
    std::vector<Budgets> out;
    const auto& xs = curve_a2.x;
    if (xs.empty() || curve_a1.x.empty()) return out;

    const double scale = std::max({1.0, std::abs(xs.front()), std::abs(xs.back())});
    const double tol = 1e-9 * scale;

    std::vector<double> gap(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) gap[k] = curve_a1(curve_a2(xs[k])) - xs[k];

    const auto push = [&](double a1) {
        const Budgets b{a1, curve_a2(a1)};
        for (const auto& seen : out) {
            if (std::abs(seen.alpha1 - b.alpha1) <= tol && std::abs(seen.alpha2 - b.alpha2) <= tol) return;
        }
        out.push_back(b);
    };

    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (std::abs(gap[k]) <= tol) push(xs[k]);
        if (k + 1 < xs.size() && std::abs(gap[k + 1]) > tol && std::abs(gap[k]) > tol &&
            (gap[k] < 0) != (gap[k + 1] < 0)) {
            const double a1 = xs[k] - gap[k] * (xs[k + 1] - xs[k]) / (gap[k + 1] - gap[k]);
            push(a1);
        }
    }
    return out;
}

double OptimizationReport::grid_best_to_intersection_steps() const {
    const auto step = [](const std::vector<double>& axis) {
        return axis.size() > 1 ? (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1)
                               : 0.0;
    };
    const double s1 = step(alpha1_axis);
    const double s2 = step(alpha2_axis);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : intersections) {
        const double d1 = s1 > 0 ? std::abs(x.budgets.alpha1 - grid_best.budgets.alpha1) / s1 : 0.0;
        const double d2 = s2 > 0 ? std::abs(x.budgets.alpha2 - grid_best.budgets.alpha2) / s2 : 0.0;
        best = std::min(best, std::max(d1, d2));
    }
    return best;
}

OptimizationReport optimize_budgets(const RevenueModel& model, const OptimizeOptions& options) {
    if (options.resolution < 10) throw std::invalid_argument("optimize_budgets: resolution must be >= 10");

    OptimizationReport rep;
    rep.alpha1_axis = model.alpha1_axis(options.resolution);
    rep.alpha2_axis = model.alpha2_axis(options.resolution);
    const auto n1 = rep.alpha1_axis.size();
    const auto n2 = rep.alpha2_axis.size();

    rep.grid.resize(n1 * n2);
    parallel_for(n1 * n2, [&](std::size_t cell) {
        const Budgets b{rep.alpha1_axis[cell / n2], rep.alpha2_axis[cell % n2]};
        rep.grid[cell] = model(b);
    });

    std::vector<double> totals(rep.grid.size());
    for (std::size_t k = 0; k < totals.size(); ++k) totals[k] = rep.grid[k].total;
    const auto best_cell = argmax_first(totals);
    rep.grid_best = {{rep.alpha1_axis[best_cell / n2], rep.alpha2_axis[best_cell % n2]},
                     rep.grid[best_cell]};

    // Sequential one-dimensional best responses, read off the grid.
    rep.curve_a1.x = rep.alpha2_axis;
    rep.curve_a1.y.resize(n2);
    for (std::size_t j = 0; j < n2; ++j) {
        std::vector<double> column(n1);
        for (std::size_t i = 0; i < n1; ++i) column[i] = rep.at(i, j).total;
        rep.curve_a1.y[j] = rep.alpha1_axis[argmax_first(column)];
    }
    rep.curve_a2.x = rep.alpha1_axis;
    rep.curve_a2.y.resize(n1);
    for (std::size_t i = 0; i < n1; ++i) {
        std::vector<double> row(totals.begin() + static_cast<std::ptrdiff_t>(i * n2),
                                totals.begin() + static_cast<std::ptrdiff_t>((i + 1) * n2));
        rep.curve_a2.y[i] = rep.alpha2_axis[argmax_first(row)];
    }

    const auto crossings = find_intersections(rep.curve_a1, rep.curve_a2);
    rep.intersections.resize(crossings.size());
    parallel_for(crossings.size(), [&](std::size_t k) {
        rep.intersections[k] = {crossings[k], model(crossings[k])};
    });

    rep.best = rep.grid_best;
    for (const auto& x : rep.intersections) {
        if (x.revenue.total > rep.best.revenue.total) rep.best = x;
    }

    if (options.reevaluate_with_agents) {
        rep.best_agents = model.with_solver(SolverChoice::Agents)(rep.best.budgets);
    }
    return rep;
}

SchemeComparison compare_schemes(const RevenueModel& model, const OptimizationReport& joint,
                                 int resolution) {
    SchemeComparison out;

    const auto cell = best_budget_1d(Axis::Alpha2, 0.0, model, resolution);
    out.pure_cellular.budgets = {cell.alpha, 0.0};
    out.pure_cellular.revenue = model(out.pure_cellular.budgets);

    const auto edge = best_budget_1d(Axis::Alpha1, 0.0, model, resolution);
    out.pure_edge.budgets = {0.0, edge.alpha};
    out.pure_edge.revenue = model(out.pure_edge.budgets);

    out.joint = joint.best;
    for (const auto* pure : {&out.pure_cellular, &out.pure_edge}) {
        if (pure->revenue.total > out.joint.revenue.total) out.joint = *pure;
    }

    const double j = out.joint.revenue.total;
    if (out.pure_cellular.revenue.total > 0) out.gain_vs_cellular = j / out.pure_cellular.revenue.total - 1.0;
    if (out.pure_edge.revenue.total > 0) out.gain_vs_edge = j / out.pure_edge.revenue.total - 1.0;
    return out;
}

SchemeComparison compare_schemes(const RevenueModel& model, int resolution) {
    OptimizeOptions opts;
    opts.resolution = resolution;
    opts.reevaluate_with_agents = false;
    return compare_schemes(model, optimize_budgets(model, opts), resolution);
}

} // namespace edgesp
