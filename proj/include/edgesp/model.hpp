#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edgesp {

/// Scalar market parameters. Defaults are the reference experiment values.
struct ModelParams {
    double v = 3.0;     ///< user benefit per sponsored request
    double c1 = 1.5;    ///< user energy cost per cellular request
    double c2 = 1.0;    ///< user energy cost per edge request
    double phi1 = 0.1;  ///< time-average cost of joining CellSp
    double phi2 = 0.1;  ///< time-average cost of joining EdgeSp
    double u = 3.0;     ///< CP revenue per sponsored request
    double h1 = 1.5;    ///< CP cost per unit of cellular budget
    double h2 = 2.0;    ///< CP cost per cached content per period
    std::int64_t S = 1000;
    double gamma = 0.8; ///< Zipf exponent of content popularity
    std::int64_t U = 10000;
    double alpha_min = 0.0;
    double alpha_max = 10000.0;

    /// Upper bound for the edge budget; caching beyond the catalog is meaningless.
    double alpha2_upper() const noexcept;

    bool operator==(const ModelParams&) const = default;
};

/// Stage-I decision. alpha2 counts cached contents (fractional allowed).
struct Budgets {
    double alpha1 = 2000.0;
    double alpha2 = 1000.0;

    bool operator==(const Budgets&) const = default;
};

struct UserType {
    double f = 0.0; ///< request probability per slot
    double r = 0.0; ///< edge-coverage probability
};

/// User population, stored as parallel arrays so kernels can stream over it.
class Population {
  public:
    Population() = default;
    Population(std::vector<double> f, std::vector<double> r, std::uint64_t seed = 0);
    explicit Population(const std::vector<UserType>& users);

    std::size_t size() const noexcept { return f_.size(); }
    UserType operator[](std::size_t i) const noexcept { return {f_[i], r_[i]}; }
    const std::vector<double>& f() const noexcept { return f_; }
    const std::vector<double>& r() const noexcept { return r_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Subset by index, preserving order. Seed is reset to 0.
    Population subset(const std::vector<std::size_t>& indices) const;

  private:
    std::vector<double> f_;
    std::vector<double> r_;
    std::uint64_t seed_ = 0;
};

/// Where the population comes from: a seed for uniform sampling, or a CSV file.
struct PopulationSpec {
    std::uint64_t seed = 42;
    std::optional<std::string> path;

    bool operator==(const PopulationSpec&) const = default;
};

struct Config {
    ModelParams params;
    Budgets budgets;
    PopulationSpec population;

    bool operator==(const Config&) const = default;
};

/// Raised for malformed config text or invariant violations. `field()` names the offender.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

void validate(const ModelParams& params);
void validate(const Budgets& budgets, const ModelParams& params);

/// Parses a flat `key = value` document. Blank lines and `#` comments are ignored;
/// unknown keys, duplicate keys and bad values are errors. Missing keys keep defaults.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

/// Inverse of parse_config; values are written with round-trip precision.
std::string to_config_text(const Config& config);

/// Draws U users with (f, r) i.i.d. uniform on the unit square.
Population sample_population(const ModelParams& params, std::uint64_t seed);

/// Reads a CSV with header `f,r`. Each value must lie in [0, 1].
Population load_population_csv(const std::string& path);

/// Resolves a PopulationSpec: file when given, otherwise sampling. Size must equal params.U.
Population make_population(const Config& config);

} // namespace edgesp
