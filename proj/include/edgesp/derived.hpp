#pragma once

#include <cstdint>
#include <vector>

#include "edgesp/membership.hpp"
#include "edgesp/model.hpp"

namespace edgesp {

/// Zipf content popularity over a catalog of S items, ranked 1..S.
class ZipfCatalog {
  public:
    ZipfCatalog(std::int64_t S, double gamma);

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(pmf_.size()); }
    double gamma() const noexcept { return gamma_; }

    /// g(s) for rank s in 1..S.
    double pmf(std::int64_t s) const { return pmf_.at(static_cast<std::size_t>(s - 1)); }
    /// Sum of g(1..s); cdf(0) == 0.
    double cdf(std::int64_t s) const { return s == 0 ? 0.0 : cdf_.at(static_cast<std::size_t>(s - 1)); }

    const std::vector<double>& pmf_values() const noexcept { return pmf_; }
    const std::vector<double>& cdf_values() const noexcept { return cdf_; }

  private:
    double gamma_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

ZipfCatalog build_catalog(std::int64_t S, double gamma);

/// Probability that a request targets one of the first alpha2 contents.
/// Fractional alpha2 interpolates linearly between neighbouring integer budgets.
double cache_hit_prob(const ZipfCatalog& catalog, double alpha2);

struct RequestLoads {
    double n_c = 0.0;
    double n_e = 0.0;
};

/// Expected cellular- and edge-sponsored requests per slot for an assignment.
RequestLoads expected_requests(const Population& population, const MembershipAssignment& assignment,
                               double rho);

/// Cellular sponsor probability: min(alpha1 / n_c, 1). With no demand the budget covers
/// everything (1), unless there is no budget at all (0).
double sponsor_prob(double alpha1, double n_c);

/// Coupled quantities at one assignment. delta1/delta2 are the per-request instant payoffs.
struct MarketState {
    double rho = 0.0;
    double n_c = 0.0;
    double n_e = 0.0;
    double p = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
};

/// Builds a state from (rho, loads, p), deriving delta1 and delta2 from params.
MarketState make_state(double rho, RequestLoads loads, double p, const ModelParams& params);

MarketState market_state(const Population& population, const MembershipAssignment& assignment,
                         const Budgets& budgets, const ModelParams& params,
                         const ZipfCatalog& catalog);

} // namespace edgesp
