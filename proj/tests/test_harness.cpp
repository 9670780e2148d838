#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "edgesp/harness.hpp"

using namespace edgesp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "edgesp_test_harness" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

harness::ExperimentSpec small_spec(harness::ExperimentKind kind, std::int64_t users = 2000) {
    harness::ExperimentSpec spec;
    spec.kind = kind;
    spec.overrides["U"] = static_cast<double>(users);
    return spec;
}

} // namespace

TEST_CASE("parameter overrides") {
    Config c;
    harness::set_parameter(c, "phi", 0.25);
    CHECK(c.params.phi1 == 0.25);
    CHECK(c.params.phi2 == 0.25);
    harness::set_parameter(c, "alpha1", 77);
    CHECK(c.budgets.alpha1 == 77);
    CHECK_THROWS_AS(harness::set_parameter(c, "nope", 1), ConfigError);

    harness::ExperimentSpec spec;
    spec.overrides["c1"] = -2;
    CHECK_THROWS_AS(harness::effective_config(spec), ConfigError);

    harness::ExperimentSpec sweep;
    sweep.kind = harness::ExperimentKind::Sweep;
    CHECK_THROWS_AS(harness::validate(sweep), std::invalid_argument);
    sweep.sweep = harness::SweepSpec{"v", 2, 4, 1};
    CHECK_THROWS_AS(harness::validate(sweep), std::invalid_argument);
}

TEST_CASE("region map") {
    auto spec = small_spec(harness::ExperimentKind::RegionMap);
    spec.resolution = 41;
    spec.output_dir = scratch("region");
    const auto map = harness::run_region_map(spec);
    REQUIRE(map.labels.size() == 41u * 41u);
    CHECK(map.types[0].f == 0.0);
    CHECK(map.types[0].r == 0.0);
    CHECK(map.labels[0] == Membership::NoSp);

    CHECK(first_line(spec.output_dir / "region_map.csv") == "f,r,membership");
    CHECK(line_count(spec.output_dir / "region_map.csv") == 41u * 41u + 1);
    CHECK(fs::exists(spec.output_dir / "indifferent_points.csv"));

    SUBCASE("both indifferent points in the domain show all four memberships") {
        REQUIRE(map.points.n1_in_domain);
        REQUIRE(map.points.n2_in_domain);
        std::array<int, 4> seen{};
        for (auto m : map.labels) ++seen[index_of(m)];
        for (int k = 0; k < 4; ++k) CHECK(seen[k] > 0);
    }
    SUBCASE("edge never beats cellular below r = delta1 / delta2") {
        auto weak = small_spec(harness::ExperimentKind::RegionMap);
        weak.overrides["alpha2"] = 20; // small cache, small delta2
        weak.resolution = 41;
        const auto m2 = harness::run_region_map(weak);
        const double cut = m2.state.delta1 / m2.state.delta2;
        for (std::size_t k = 0; k < m2.labels.size(); ++k) {
            if (m2.labels[k] == Membership::EdgeSp) CHECK(m2.types[k].r >= cut);
        }
    }
}

TEST_CASE("sweep") {
    SUBCASE("a repeated value gives identical rows") {
        auto spec = small_spec(harness::ExperimentKind::Sweep);
        spec.sweep = harness::SweepSpec{"v", 3.0, 3.0, 2};
        spec.output_dir = scratch("sweep_same");
        const auto rows = harness::run_sweep(spec);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].mu == rows[1].mu);
        CHECK(first_line(spec.output_dir / "sweep_v.csv") == "param,mu_N,mu_C,mu_E,mu_H");
        CHECK(line_count(spec.output_dir / "sweep_v.csv") == 3);
    }
    SUBCASE("rows follow the swept values in order") {
        auto spec = small_spec(harness::ExperimentKind::Sweep);
        spec.sweep = harness::SweepSpec{"c1", 1.0, 3.5, 6};
        const auto rows = harness::run_sweep(spec);
        REQUIRE(rows.size() == 6);
        for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k].value == doctest::Approx(1.0 + 0.5 * k));
        CHECK(rows.back().mu[1] == 0.0);
    }
}

TEST_CASE("dynamics artifact") {
    SUBCASE("prohibitive cost: initial row plus the all-N fixed point") {
        auto spec = small_spec(harness::ExperimentKind::Dynamics);
        spec.overrides["phi"] = 3.5;
        spec.output_dir = scratch("dyn_phi");
        const auto res = harness::run_dynamics(spec);
        CHECK(res.converged);
        CHECK(first_line(spec.output_dir / "dynamics.csv") == "iter,mu_N,mu_C,mu_E,mu_H,P,rho,N_C,N_E");
        CHECK(line_count(spec.output_dir / "dynamics.csv") == 3);
    }
    SUBCASE("same seed, byte-identical CSV") {
        auto a = small_spec(harness::ExperimentKind::Dynamics);
        auto b = a;
        a.output_dir = scratch("dyn_a");
        b.output_dir = scratch("dyn_b");
        harness::run_dynamics(a);
        harness::run_dynamics(b);
        const auto text = slurp(a.output_dir / "dynamics.csv");
        CHECK(text.size() > 100);
        CHECK(text == slurp(b.output_dir / "dynamics.csv"));
    }
    SUBCASE("calibration covers the gamma sweep") {
        auto spec = small_spec(harness::ExperimentKind::Dynamics);
        spec.output_dir = scratch("calib");
        const auto cal = harness::run_calibration(spec);
        REQUIRE(cal.rows.size() == 4);
        CHECK(cal.rows[0].gamma == 0.6);
        CHECK(cal.rows[3].gamma == 1.2);
        for (const auto& r : cal.rows) CHECK(r.distance >= cal.rows[cal.best].distance);
        CHECK(fs::exists(spec.output_dir / "calibration.csv"));
    }
}

TEST_CASE("contour and comparison artifacts") {
    auto spec = small_spec(harness::ExperimentKind::Contour);
    spec.overrides["alpha_max"] = 2000;
    spec.resolution = 12;
    spec.solver = SolverChoice::FixedPoint;
    spec.output_dir = scratch("contour");
    const auto rep = harness::run_contour(spec);
    CHECK(first_line(spec.output_dir / "contour.csv") == "alpha1,alpha2,u_c,u_e,total");
    CHECK(line_count(spec.output_dir / "contour.csv") == 12u * 12u + 1);
    CHECK(fs::exists(spec.output_dir / "curves.csv"));
    CHECK(fs::exists(spec.output_dir / "intersections.csv"));
    CHECK(fs::exists(spec.output_dir / "optimum.csv"));
    CHECK(fs::exists(spec.output_dir / "intersection_counterexample.csv") ==
          (rep.grid_best_to_intersection_steps() > 1.0));

    spec.kind = harness::ExperimentKind::Compare;
    spec.output_dir = scratch("compare");
    const auto runs = harness::run_compare(spec, {1.0});
    REQUIRE(runs.size() == 2);
    CHECK(runs[1].u == 1.0);
    CHECK(first_line(spec.output_dir / "compare.csv") == "scheme,alpha1,alpha2,total");
    CHECK(line_count(spec.output_dir / "compare.csv") == 4);
    CHECK(fs::exists(spec.output_dir / "compare_u.csv"));
    for (const auto& r : runs) {
        CHECK(r.result.joint.revenue.total >= r.result.pure_cellular.revenue.total);
        CHECK(r.result.joint.revenue.total >= r.result.pure_edge.revenue.total);
    }
}

TEST_CASE("oracle") {
    auto spec = small_spec(harness::ExperimentKind::Oracle, 100);
    spec.output_dir = scratch("oracle");
    harness::OracleOptions opts;
    opts.runs = 4;
    SUBCASE("clean runs") {
        const auto rep = harness::run_oracle(spec, opts);
        CHECK(rep.ok());
        CHECK(rep.runs == 4);
        CHECK(rep.converged_runs == 4);
        CHECK(line_count(spec.output_dir / "oracle.csv") == 5);
        CHECK(line_count(spec.output_dir / "oracle_violations.csv") == 1);
    }
    SUBCASE("a corrupted label is caught") {
        opts.corrupt_one_label = true;
        const auto rep = harness::run_oracle(spec, opts);
        CHECK_FALSE(rep.ok());
        CHECK(rep.violations.size() >= 4);
    }
    SUBCASE("populations are capped") {
        auto big = small_spec(harness::ExperimentKind::Oracle, 501);
        CHECK_THROWS_AS(harness::run_oracle(big, opts), std::invalid_argument);
    }
}

TEST_CASE("without a cache every edge member could do better") {
    ModelParams k;
    k.U = 100;
    const auto z = build_catalog(k.S, k.gamma);
    const auto pop = sample_population(k, 3);
    const Budgets b{2000, 0};
    std::vector<Membership> labels(pop.size(), Membership::NoSp);
    for (std::size_t i = 0; i < pop.size(); i += 3) labels[i] = Membership::EdgeSp;
    const auto rep = verify_equilibrium(pop, MembershipAssignment(labels), b, k, z, 1e-9);
    std::size_t edge_flagged = 0;
    for (const auto& d : rep.violations) {
        if (d.current == Membership::EdgeSp) {
            ++edge_flagged;
            CHECK(d.current_payoff == doctest::Approx(-k.phi2));
        }
    }
    CHECK(edge_flagged == (pop.size() + 2) / 3);
}
