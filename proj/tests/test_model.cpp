#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "edgesp/model.hpp"

using namespace edgesp;

TEST_CASE("empty document yields the reference defaults") {
    const auto c = parse_config("");
    CHECK(c.params.v == 3.0);
    CHECK(c.params.c1 == 1.5);
    CHECK(c.params.c2 == 1.0);
    CHECK(c.params.phi1 == 0.1);
    CHECK(c.params.phi2 == 0.1);
    CHECK(c.params.u == 3.0);
    CHECK(c.params.h1 == 1.5);
    CHECK(c.params.h2 == 2.0);
    CHECK(c.params.S == 1000);
    CHECK(c.params.U == 10000);
    CHECK(c.budgets.alpha1 == 2000.0);
    CHECK(c.budgets.alpha2 == 1000.0);
    CHECK(c.population.seed == 42);
    CHECK_FALSE(c.population.path);
}

TEST_CASE("invariant violations name the offending field") {
    const auto field_of = [](const char* text) -> std::string {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return "";
    };
    CHECK(field_of("c1 = -1") == "c1");
    CHECK(field_of("c2 = -0.5") == "c2");
    CHECK(field_of("phi1 = -0.1") == "phi1");
    CHECK(field_of("S = 0") == "S");
    CHECK(field_of("U = 0") == "U");
    CHECK(field_of("gamma = 0") == "gamma");
    CHECK(field_of("alpha2 = 1001") == "alpha2");
    CHECK(field_of("alpha1 = -3") == "alpha1");
    CHECK(field_of("bogus = 1") == "bogus");
    CHECK(field_of("v = 1\nv = 2") == "v");
    CHECK(field_of("v = abc") == "v");
    CHECK_THROWS_AS(parse_config("no equals sign"), ConfigError);
}

TEST_CASE("values pass through verbatim") {
    const auto c = parse_config("# catalog\nS = 3\ngamma = 1.0\nalpha2 = 2  # two cached\n");
    CHECK(c.params.S == 3);
    CHECK(c.params.gamma == 1.0);
    CHECK(c.budgets.alpha2 == 2.0);
    CHECK(c.params.v == 3.0);
}

TEST_CASE("config text round-trips") {
    Config c;
    c.params.v = 2.718281828459045;
    c.params.phi2 = 0.3;
    c.params.S = 77;
    c.budgets.alpha1 = 123.456;
    c.budgets.alpha2 = 5.5;
    c.population.seed = 987654321;
    CHECK(parse_config(to_config_text(c)) == c);
}

TEST_CASE("population sampling") {
    ModelParams p;
    SUBCASE("same seed, same population") {
        const auto a = sample_population(p, 42);
        const auto b = sample_population(p, 42);
        CHECK(a.f() == b.f());
        CHECK(a.r() == b.r());
        CHECK(a.size() == 10000);
    }
    SUBCASE("different seeds differ") {
        CHECK(sample_population(p, 1).f() != sample_population(p, 2).f());
    }
    SUBCASE("sample mean of f is near 1/2") {
        const auto pop = sample_population(p, 42);
        double sum = 0.0;
        for (double f : pop.f()) sum += f;
        CHECK(std::abs(sum / 10000.0 - 0.5) < 0.01);
    }
    SUBCASE("single user lies in the unit square") {
        p.U = 1;
        const auto pop = sample_population(p, 7);
        REQUIRE(pop.size() == 1);
        CHECK(pop[0].f >= 0.0);
        CHECK(pop[0].f <= 1.0);
        CHECK(pop[0].r >= 0.0);
        CHECK(pop[0].r <= 1.0);
    }
}

TEST_CASE("population csv") {
    const auto dir = std::filesystem::temp_directory_path() / "edgesp_test_model";
    std::filesystem::create_directories(dir);
    const auto good = dir / "good.csv";
    std::ofstream(good) << "f,r\n0.25,0.5\n1,0\n";
    const auto pop = load_population_csv(good.string());
    REQUIRE(pop.size() == 2);
    CHECK(pop[0].f == 0.25);
    CHECK(pop[1].r == 0.0);

    const auto bad = dir / "bad.csv";
    std::ofstream(bad) << "f,r\n1.5,0.5\n";
    CHECK_THROWS_AS(load_population_csv(bad.string()), ConfigError);
    CHECK_THROWS_AS(load_population_csv((dir / "missing.csv").string()), ConfigError);

    Config c;
    c.params.U = 3;
    c.population.path = good.string();
    CHECK_THROWS_AS(make_population(c), ConfigError);
    c.params.U = 2;
    CHECK(make_population(c).size() == 2);
}

TEST_CASE("subset keeps order") {
    const Population pop({0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, 9);
    const auto s = pop.subset({2, 0});
    REQUIRE(s.size() == 2);
    CHECK(s[0].f == 0.3);
    CHECK(s[1].r == 0.4);
}

TEST_CASE("alpha2 upper bound is the catalog size") {
    ModelParams p;
    CHECK(p.alpha2_upper() == 1000.0);
    p.alpha_max = 500;
    CHECK(p.alpha2_upper() == 500.0);
}
