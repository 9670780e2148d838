#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "edgesp/simd/kernels.hpp"

namespace edgesp::simd {

namespace {

constexpr KernelTable kScalar{Backend::Scalar, &scalar::classify, &scalar::loads};
#if defined(EDGESP_HAVE_AVX2)
constexpr KernelTable kAvx2{Backend::Avx2, &avx2::classify, &avx2::loads};
#endif

const KernelTable* pick_default() {
    if (const char* env = std::getenv("EDGESP_SIMD"); env && *env) {
        const auto b = parse_backend(env);
        if (!b) throw std::invalid_argument(std::string("EDGESP_SIMD: unknown backend '") + env + "'");
        return &kernels(*b);
    }
    if (backend_available(Backend::Avx2)) return &kernels(Backend::Avx2);
    return &kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

} // namespace

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
    if (name == "scalar") return Backend::Scalar;
    if (name == "avx2") return Backend::Avx2;
    return std::nullopt;
}

bool backend_available(Backend b) noexcept {
    switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(EDGESP_HAVE_AVX2)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

const KernelTable& kernels(Backend b) {
    if (!backend_available(b)) {
        throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b)) +
                                    "' is not available on this machine");
    }
#if defined(EDGESP_HAVE_AVX2)
    if (b == Backend::Avx2) return kAvx2;
#endif
    return kScalar;
}

const KernelTable& kernels() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        const KernelTable* chosen = pick_default();
        g_active.compare_exchange_strong(t, chosen, std::memory_order_acq_rel);
        t = g_active.load(std::memory_order_acquire);
    }
    return *t;
}

void set_active_backend(Backend b) { g_active.store(&kernels(b), std::memory_order_release); }

} // namespace edgesp::simd
