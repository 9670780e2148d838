#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesp/model.hpp"
#include "edgesp/payoffs.hpp"
#include "edgesp/stage1.hpp"
#include "edgesp/stage2.hpp"

namespace edgesp::harness {

enum class ExperimentKind { RegionMap, Sweep, Dynamics, Contour, Compare, Oracle };

struct SweepSpec {
    std::string param;
    double start = 0.0;
    double stop = 0.0;
    int steps = 2;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Dynamics;
    Config config;                            ///< base configuration (file + --seed)
    std::map<std::string, double> overrides;  ///< per-experiment parameter changes
    std::optional<SweepSpec> sweep;           ///< required for Sweep
    std::filesystem::path output_dir;         ///< empty: no files written
    int resolution = 50;
    SolverChoice solver = SolverChoice::Agents;
    DynamicsOptions dynamics;
};

/// Sets a named parameter (a ModelParams or Budgets field; `phi` sets phi1 and phi2).
/// Throws ConfigError on unknown names. Does not validate; see effective_config.
void set_parameter(Config& config, const std::string& name, double value);

/// Base config with overrides applied, validated.
Config effective_config(const ExperimentSpec& spec);

/// Throws std::invalid_argument when a sweep is missing or malformed.
void validate(const ExperimentSpec& spec);

/// Stage-II equilibrium through the chosen solver, as an assignment-free summary.
struct Equilibrium {
    MarketState state;
    MuVector mu{};
    int iterations = 0;
    bool converged = true;
    bool cycle_broken = false;
};

Equilibrium solve_equilibrium(const Config& config, const Population& population,
                              const ZipfCatalog& catalog, SolverChoice solver,
                              const DynamicsOptions& dynamics);

struct RegionMap {
    MarketState state;
    IndifferentPoints points;
    int grid = 0;
    std::vector<TypePoint> types;
    std::vector<Membership> labels;
};

/// Classifies a grid x grid lattice of types (corners included) at the equilibrium state.
/// Writes region_map.csv (f,r,membership) and indifferent_points.csv.
RegionMap run_region_map(const ExperimentSpec& spec);

struct SweepRow {
    double value = 0.0;
    MuVector mu{};
    bool converged = true;
};

/// Stage-II equilibrium at each swept value with budgets fixed. Writes sweep_<param>.csv.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec);

/// Full membership trace from the all-N start. Writes dynamics.csv.
EquilibriumResult run_dynamics(const ExperimentSpec& spec);

/// Equilibrium fractions reported for the reference dynamics experiment.
inline constexpr MuVector kReferenceMu = {0.09, 0.28, 0.21, 0.42};
inline constexpr double kCalibrationTolerance = 0.08;

struct CalibrationRow {
    double gamma = 0.0;
    MuVector mu{};
    double distance = 0.0; ///< max-component distance to kReferenceMu
    int iterations = 0;
    bool converged = false;
};

struct Calibration {
    std::vector<CalibrationRow> rows;
    std::size_t best = 0;
    bool within_tolerance() const { return !rows.empty() && rows[best].distance <= kCalibrationTolerance; }
};

/// Runs the dynamics for each gamma in {0.6, 0.8, 1.0, 1.2}. Writes calibration.csv.
Calibration run_calibration(const ExperimentSpec& spec);

/// Budget grid, best-response curves and intersections. Writes contour.csv, curves.csv,
/// intersections.csv, optimum.csv, and intersection_counterexample.csv when the grid optimum is
/// more than one step from every intersection.
OptimizationReport run_contour(const ExperimentSpec& spec);

struct CompareRun {
    double u = 0.0;
    SchemeComparison result;
};

/// Joint vs pure schemes at the configured u, plus any extra u values.
/// Writes compare.csv (scheme,alpha1,alpha2,total), gains.csv, and compare_u.csv for extra u values.
std::vector<CompareRun> run_compare(const ExperimentSpec& spec, const std::vector<double>& extra_u = {});

struct OracleViolation {
    int run = 0;
    std::uint64_t seed = 0;
    std::string check;
    std::string detail;
};

struct OracleOptions {
    int runs = 20;
    double epsilon = 1e-9;
    double mu_tolerance = 0.02;
    bool corrupt_one_label = false; ///< negative control: flip one label after solving
};

struct OracleReport {
    int runs = 0;
    int converged_runs = 0;
    double max_mu_gap = 0.0;
    std::vector<OracleViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Seeded small populations (U <= 500): solve, exhaustively check every unilateral deviation,
/// check that one more round is the identity, cross-check the selection regions against the
/// argmax, and compare agent-based with fixed-point fractions. Writes oracle.csv.
OracleReport run_oracle(const ExperimentSpec& spec, const OracleOptions& options = {});

} // namespace edgesp::harness
