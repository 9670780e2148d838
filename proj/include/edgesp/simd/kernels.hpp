#pragma once
// Data-parallel inner loops of the equilibrium solvers.
//
// Every kernel exists as a portable scalar reference and, on x86-64, an AVX2
// variant selected at runtime. Variants are bit-identical: payoffs use the same
// operation order, and sums are accumulated in kLanes interleaved partial sums
// (element i goes to lane i % kLanes) that are folded as (l0 + l1) + (l2 + l3).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "edgesp/membership.hpp"

namespace edgesp::simd {

inline constexpr std::size_t kLanes = 4;

/// Read-only view over user types. `weight == nullptr` means unit weights.
struct TypeView {
    const double* f = nullptr;
    const double* r = nullptr;
    const double* weight = nullptr;
    std::size_t size = 0;
};

/// Market-dependent terms of the four payoffs.
struct PayoffCoefficients {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double rho = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

/// Weighted sponsored loads and membership mass produced by a classification pass.
struct ClassifyTotals {
    double n_c = 0.0;
    double n_e = 0.0;
    std::array<double, 4> mass{};
};

/// Best-responds every type to the coefficients (ties prefer N, then C, then E).
/// Labels are written to `labels` when it is non-null.
using ClassifyFn = ClassifyTotals (*)(const TypeView& types, const PayoffCoefficients& coeffs,
                                      Membership* labels);

/// Unit-weight loads (n_c, n_e) for fixed labels at cache-hit probability rho.
using LoadsFn = std::array<double, 2> (*)(const double* f, const double* r, const Membership* labels,
                                          std::size_t n, double rho);

enum class Backend { Scalar, Avx2 };

struct KernelTable {
    Backend backend;
    ClassifyFn classify;
    LoadsFn loads;
};

std::string_view backend_name(Backend b) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;
bool backend_available(Backend b) noexcept;

/// Kernels for a specific backend. Throws std::invalid_argument if unavailable on this CPU.
const KernelTable& kernels(Backend b);

/// Active kernels. First call picks $EDGESP_SIMD if set, else the widest supported backend.
const KernelTable& kernels();

/// Overrides the active backend for the whole process.
void set_active_backend(Backend b);

namespace scalar {
ClassifyTotals classify(const TypeView& types, const PayoffCoefficients& coeffs, Membership* labels);
std::array<double, 2> loads(const double* f, const double* r, const Membership* labels, std::size_t n,
                            double rho);
} // namespace scalar

#if defined(EDGESP_HAVE_AVX2)
namespace avx2 {
ClassifyTotals classify(const TypeView& types, const PayoffCoefficients& coeffs, Membership* labels);
std::array<double, 2> loads(const double* f, const double* r, const Membership* labels, std::size_t n,
                            double rho);
} // namespace avx2
#endif

} // namespace edgesp::simd
