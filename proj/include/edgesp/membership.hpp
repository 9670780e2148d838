#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edgesp {

/// Sponsorship membership. The numeric order is also the tie-break preference.
enum class Membership : std::uint8_t {
    NoSp = 0,
    CellSp = 1,
    EdgeSp = 2,
    HybridSp = 3,
};

inline constexpr std::array<Membership, 4> kAllMemberships = {
    Membership::NoSp, Membership::CellSp, Membership::EdgeSp, Membership::HybridSp};

constexpr char to_char(Membership m) noexcept { return "NCEH"[static_cast<int>(m)]; }

constexpr std::size_t index_of(Membership m) noexcept { return static_cast<std::size_t>(m); }

/// (mu_N, mu_C, mu_E, mu_H)
using MuVector = std::array<double, 4>;

/// Per-user labels plus membership fractions.
struct MembershipAssignment {
    std::vector<Membership> labels;
    MuVector mu{};

    MembershipAssignment() = default;
    explicit MembershipAssignment(std::vector<Membership> l) : labels(std::move(l)) { refresh_mu(); }

    static MembershipAssignment uniform(std::size_t n, Membership m) {
        return MembershipAssignment(std::vector<Membership>(n, m));
    }

    std::size_t size() const noexcept { return labels.size(); }

    void refresh_mu() {
        std::array<std::size_t, 4> counts{};
        for (auto m : labels) ++counts[index_of(m)];
        const double n = labels.empty() ? 1.0 : static_cast<double>(labels.size());
        for (std::size_t k = 0; k < 4; ++k) mu[k] = static_cast<double>(counts[k]) / n;
    }

    bool operator==(const MembershipAssignment& o) const { return labels == o.labels; }
};

/// Max absolute per-component difference.
inline double mu_distance(const MuVector& a, const MuVector& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double x = a[k] > b[k] ? a[k] - b[k] : b[k] - a[k];
        if (x > d) d = x;
    }
    return d;
}

} // namespace edgesp
