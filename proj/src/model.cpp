#include "edgesp/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace edgesp {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(std::string_view key, std::string_view text) {
    double out = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ConfigError(std::string(key),
                          "config: field '" + std::string(key) + "' expects a real number, got '" +
                              std::string(text) + "'");
    }
    return out;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text) {
    Int out = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(std::string(key),
                          "config: field '" + std::string(key) + "' expects an integer, got '" +
                              std::string(text) + "'");
    }
    return out;
}

void require(bool ok, const char* field, double value, const char* rule) {
    if (ok) return;
    throw ConfigError(field, std::string("invalid ") + field + " = " + format_real(value) + " (" +
                                 rule + ")");
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return std::string(s.substr(1, s.size() - 2));
    }
    return std::string(s);
}

} // namespace

double ModelParams::alpha2_upper() const noexcept {
    return std::min(alpha_max, static_cast<double>(S));
}

Population::Population(std::vector<double> f, std::vector<double> r, std::uint64_t seed)
    : f_(std::move(f)), r_(std::move(r)), seed_(seed) {
    if (f_.size() != r_.size()) throw std::invalid_argument("population: f and r lengths differ");
}

Population::Population(const std::vector<UserType>& users) {
    f_.reserve(users.size());
    r_.reserve(users.size());
    for (const auto& t : users) {
        f_.push_back(t.f);
        r_.push_back(t.r);
    }
}

Population Population::subset(const std::vector<std::size_t>& indices) const {
    std::vector<double> f, r;
    f.reserve(indices.size());
    r.reserve(indices.size());
    for (auto i : indices) {
        f.push_back(f_.at(i));
        r.push_back(r_.at(i));
    }
    return Population(std::move(f), std::move(r));
}

void validate(const ModelParams& p) {
    require(p.v >= 0, "v", p.v, "must be >= 0");
    require(p.c1 >= 0, "c1", p.c1, "must be >= 0");
    require(p.c2 >= 0, "c2", p.c2, "must be >= 0");
    require(p.phi1 >= 0, "phi1", p.phi1, "must be >= 0");
    require(p.phi2 >= 0, "phi2", p.phi2, "must be >= 0");
    require(p.u >= 0, "u", p.u, "must be >= 0");
    require(p.h1 >= 0, "h1", p.h1, "must be >= 0");
    require(p.h2 >= 0, "h2", p.h2, "must be >= 0");
    require(p.S >= 1, "S", static_cast<double>(p.S), "must be >= 1");
    require(p.gamma > 0, "gamma", p.gamma, "must be > 0");
    require(p.U >= 1, "U", static_cast<double>(p.U), "must be >= 1");
    require(p.alpha_min >= 0, "alpha_min", p.alpha_min, "must be >= 0");
    require(p.alpha_min <= p.alpha_max, "alpha_max", p.alpha_max, "must be >= alpha_min");
    require(p.alpha_min <= static_cast<double>(p.S), "alpha_min", p.alpha_min, "must be <= S");
}

void validate(const Budgets& b, const ModelParams& p) {
    require(b.alpha1 >= p.alpha_min && b.alpha1 <= p.alpha_max, "alpha1", b.alpha1,
            "must lie in [alpha_min, alpha_max]");
    require(b.alpha2 >= p.alpha_min && b.alpha2 <= p.alpha_max, "alpha2", b.alpha2,
            "must lie in [alpha_min, alpha_max]");
    require(b.alpha2 <= static_cast<double>(p.S), "alpha2", b.alpha2, "must be <= S");
}

Config parse_config(std::string_view text) {
    Config cfg;
    auto& p = cfg.params;
    auto& b = cfg.budgets;

    std::map<std::string, std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", "config line " + std::to_string(line_no) +
                                      ": expected 'key = value', got '" + std::string(line) + "'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(std::string(key),
                              "config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!seen.emplace(std::string(key), std::string(value)).second) {
            throw ConfigError(std::string(key), "config: duplicate key '" + std::string(key) + "'");
        }

        if (key == "v") p.v = parse_real(key, value);
        else if (key == "c1") p.c1 = parse_real(key, value);
        else if (key == "c2") p.c2 = parse_real(key, value);
        else if (key == "phi1") p.phi1 = parse_real(key, value);
        else if (key == "phi2") p.phi2 = parse_real(key, value);
        else if (key == "u") p.u = parse_real(key, value);
        else if (key == "h1") p.h1 = parse_real(key, value);
        else if (key == "h2") p.h2 = parse_real(key, value);
        else if (key == "S") p.S = parse_integer<std::int64_t>(key, value);
        else if (key == "gamma") p.gamma = parse_real(key, value);
        else if (key == "U") p.U = parse_integer<std::int64_t>(key, value);
        else if (key == "alpha_min") p.alpha_min = parse_real(key, value);
        else if (key == "alpha_max") p.alpha_max = parse_real(key, value);
        else if (key == "alpha1") b.alpha1 = parse_real(key, value);
        else if (key == "alpha2") b.alpha2 = parse_real(key, value);
        else if (key == "seed") cfg.population.seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "population") cfg.population.path = unquote(value);
        else throw ConfigError(std::string(key), "config: unknown key '" + std::string(key) + "'");
    }

    validate(p);
    validate(b, p);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const Config& c) {
    const auto& p = c.params;
    std::ostringstream os;
    os << "v = " << format_real(p.v) << '\n'
       << "c1 = " << format_real(p.c1) << '\n'
       << "c2 = " << format_real(p.c2) << '\n'
       << "phi1 = " << format_real(p.phi1) << '\n'
       << "phi2 = " << format_real(p.phi2) << '\n'
       << "u = " << format_real(p.u) << '\n'
       << "h1 = " << format_real(p.h1) << '\n'
       << "h2 = " << format_real(p.h2) << '\n'
       << "S = " << p.S << '\n'
       << "gamma = " << format_real(p.gamma) << '\n'
       << "U = " << p.U << '\n'
       << "alpha_min = " << format_real(p.alpha_min) << '\n'
       << "alpha_max = " << format_real(p.alpha_max) << '\n'
       << "alpha1 = " << format_real(c.budgets.alpha1) << '\n'
       << "alpha2 = " << format_real(c.budgets.alpha2) << '\n'
       << "seed = " << c.population.seed << '\n';
    if (c.population.path) os << "population = \"" << *c.population.path << "\"\n";
    return os.str();
}

Population sample_population(const ModelParams& params, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(params.U);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> f(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = unit(rng);
        r[i] = unit(rng);
    }
    return Population(std::move(f), std::move(r), seed);
}

Population load_population_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("population", "cannot open population file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "f,r") {
        throw ConfigError("population", "population file '" + path + "' must start with header 'f,r'");
    }
    std::vector<double> f, r;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) {
            throw ConfigError("population", path + ":" + std::to_string(line_no) + ": expected 'f,r'");
        }
        const double fv = parse_real("f", trim(row.substr(0, comma)));
        const double rv = parse_real("r", trim(row.substr(comma + 1)));
        require(fv >= 0 && fv <= 1, "f", fv, "must lie in [0, 1]");
        require(rv >= 0 && rv <= 1, "r", rv, "must lie in [0, 1]");
        f.push_back(fv);
        r.push_back(rv);
    }
    return Population(std::move(f), std::move(r), 0);
}

Population make_population(const Config& config) {
    if (!config.population.path) return sample_population(config.params, config.population.seed);
    auto pop = load_population_csv(*config.population.path);
    if (static_cast<std::int64_t>(pop.size()) != config.params.U) {
        throw ConfigError("U", "population file has " + std::to_string(pop.size()) +
                                   " users but U = " + std::to_string(config.params.U));
    }
    return pop;
}

} // namespace edgesp
