#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "edgesp/derived.hpp"
#include "edgesp/model.hpp"
#include "edgesp/stage2.hpp"

namespace edgesp {

enum class SolverChoice { Agents, FixedPoint };

/// CP revenue per slot at the Stage-II equilibrium reached for some budgets.
struct RevenueBreakdown {
    double u_c = 0.0;   ///< u P N_C - alpha1 h1
    double u_e = 0.0;   ///< u N_E - alpha2 h2
    double total = 0.0; ///< u_c + u_e

    // Equilibrium the revenue was evaluated at.
    double p = 0.0;
    double n_c = 0.0;
    double n_e = 0.0;
    MuVector mu{};
    bool converged = true;
};

RevenueBreakdown revenue_at(const Budgets& budgets, const ModelParams& params, double p, double n_c,
                            double n_e);

RevenueBreakdown cp_revenue(const Budgets& budgets, const ModelParams& params,
                            const ZipfCatalog& catalog, const Population& population,
                            SolverChoice solver, const DynamicsOptions& dynamics = {});

/// Revenue as a function of the budgets for one market. Holds references; the
/// referenced objects must outlive it.
class RevenueModel {
  public:
    RevenueModel(const ModelParams& params, const ZipfCatalog& catalog, const Population& population,
                 SolverChoice solver = SolverChoice::FixedPoint, DynamicsOptions dynamics = {});

    RevenueBreakdown operator()(const Budgets& budgets) const;

    const ModelParams& params() const noexcept { return params_; }
    const ZipfCatalog& catalog() const noexcept { return catalog_; }
    const Population& population() const noexcept { return population_; }
    SolverChoice solver() const noexcept { return solver_; }
    RevenueModel with_solver(SolverChoice solver) const;

    /// `resolution` evenly spaced budgets over [alpha_min, alpha_max] (alpha1) or
    /// [alpha_min, min(alpha_max, S)] (alpha2).
    std::vector<double> alpha1_axis(int resolution) const;
    std::vector<double> alpha2_axis(int resolution) const;

  private:
    const ModelParams& params_;
    const ZipfCatalog& catalog_;
    const Population& population_;
    SolverChoice solver_;
    DynamicsOptions dynamics_;
};

std::vector<double> linspace(double lo, double hi, int points);

/// Index of the largest value; ties go to the smallest index.
std::size_t argmax_first(const std::vector<double>& values);

struct OneDimOptimum {
    double alpha = 0.0;
    double revenue = 0.0;
};

/// Grid scan of `objective` over `resolution` points of [lo, hi]; ties go to the smaller budget.
OneDimOptimum best_budget_1d(const std::function<double(double)>& objective, double lo, double hi,
                             int resolution);

enum class Axis { Alpha1, Alpha2 };

/// Best budget on the free axis with the other axis held at `fixed_value`.
OneDimOptimum best_budget_1d(Axis fixed_axis, double fixed_value, const RevenueModel& model,
                             int resolution);

/// Piecewise-linear curve through sampled points (x ascending); constant beyond the ends.
struct SampledCurve {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double at) const;
    double max_step() const;
};

/// Crossings of alpha1 = curve_a1(alpha2) and alpha2 = curve_a2(alpha1): zeros and sign
/// changes of alpha1 -> curve_a1(curve_a2(alpha1)) - alpha1 over curve_a2's sample points.
std::vector<Budgets> find_intersections(const SampledCurve& curve_a1, const SampledCurve& curve_a2);

struct BudgetRevenue {
    Budgets budgets;
    RevenueBreakdown revenue;
};

struct OptimizationReport {
    BudgetRevenue best;
    std::optional<RevenueBreakdown> best_agents; ///< agent-based re-evaluation at `best`
    std::vector<double> alpha1_axis;
    std::vector<double> alpha2_axis;
    std::vector<RevenueBreakdown> grid; ///< grid[i * alpha2_axis.size() + j] at (alpha1_i, alpha2_j)
    SampledCurve curve_a1;              ///< alpha2 -> best alpha1
    SampledCurve curve_a2;              ///< alpha1 -> best alpha2
    std::vector<BudgetRevenue> intersections;
    BudgetRevenue grid_best;

    const RevenueBreakdown& at(std::size_t i, std::size_t j) const {
        return grid[i * alpha2_axis.size() + j];
    }

    /// Distance from the grid optimum to the nearest intersection, in grid steps
    /// (max over both axes). Infinite when there are no intersections.
    double grid_best_to_intersection_steps() const;
};

struct OptimizeOptions {
    int resolution = 50;
    bool reevaluate_with_agents = true;
};

OptimizationReport optimize_budgets(const RevenueModel& model, const OptimizeOptions& options = {});

struct SchemeComparison {
    BudgetRevenue joint;
    BudgetRevenue pure_cellular; ///< alpha2 forced to 0
    BudgetRevenue pure_edge;     ///< alpha1 forced to 0
    std::optional<double> gain_vs_cellular; ///< joint / pure_cellular - 1, when pure_cellular > 0
    std::optional<double> gain_vs_edge;
};

/// Compares the joint optimum with the pure schemes. Pure schemes are feasible points of
/// the joint problem, so they are candidates for the joint optimum as well.
SchemeComparison compare_schemes(const RevenueModel& model, const OptimizationReport& joint,
                                 int resolution);
SchemeComparison compare_schemes(const RevenueModel& model, int resolution = 50);

} // namespace edgesp
