// Compiled with -mavx2 only; reached through the dispatcher after a CPUID check.
#include "edgesp/simd/kernels.hpp"

#include <immintrin.h>

#include <cstring>

namespace edgesp::simd::avx2 {

namespace {

double fold(const double (&lane)[kLanes]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

inline __m256d select(__m256d mask, __m256d yes) { return _mm256_and_pd(mask, yes); }

inline __m256d load_labels(const Membership* labels) {
    std::int32_t packed;
    std::memcpy(&packed, labels, sizeof packed);
    return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed)));
}

inline void store_labels(Membership* labels, __m256d best) {
    const __m128i as_int = _mm256_cvttpd_epi32(best);
    const __m128i bytes = _mm_shuffle_epi8(as_int, _mm_setr_epi8(0, 4, 8, 12, -1, -1, -1, -1, -1, -1,
                                                                 -1, -1, -1, -1, -1, -1));
    const std::int32_t packed = _mm_cvtsi128_si32(bytes);
    std::memcpy(labels, &packed, sizeof packed);
}

} // namespace

ClassifyTotals classify(const TypeView& types, const PayoffCoefficients& c, Membership* labels) {
    const __m256d d1 = _mm256_set1_pd(c.delta1);
    const __m256d d2 = _mm256_set1_pd(c.delta2);
    const __m256d rho = _mm256_set1_pd(c.rho);
    const __m256d d1rho = _mm256_set1_pd(c.delta1 * c.rho);
    const __m256d phi1 = _mm256_set1_pd(c.phi1);
    const __m256d phi2 = _mm256_set1_pd(c.phi2);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d three = _mm256_set1_pd(3.0);

    __m256d acc_c = zero;
    __m256d acc_e = zero;
    __m256d acc_m[4] = {zero, zero, zero, zero};

    const std::size_t n = types.size;
    const std::size_t body = n - n % kLanes;
    for (std::size_t i = 0; i < body; i += kLanes) {
        const __m256d f = _mm256_loadu_pd(types.f + i);
        const __m256d r = _mm256_loadu_pd(types.r + i);
        const __m256d w = types.weight ? _mm256_loadu_pd(types.weight + i) : one;
        const __m256d fr = _mm256_mul_pd(f, r);

        const __m256d d1f = _mm256_mul_pd(d1, f);
        const __m256d d2fr = _mm256_mul_pd(d2, fr);
        const __m256d vc = _mm256_sub_pd(d1f, phi1);
        const __m256d ve = _mm256_sub_pd(d2fr, phi2);
        const __m256d vh = _mm256_sub_pd(
            _mm256_sub_pd(_mm256_sub_pd(_mm256_add_pd(d2fr, d1f), _mm256_mul_pd(d1rho, fr)), phi1),
            phi2);

        __m256d best = zero;
        __m256d best_v = zero;
        __m256d gt = _mm256_cmp_pd(vc, best_v, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, one, gt);
        best_v = _mm256_blendv_pd(best_v, vc, gt);
        gt = _mm256_cmp_pd(ve, best_v, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, two, gt);
        best_v = _mm256_blendv_pd(best_v, ve, gt);
        gt = _mm256_cmp_pd(vh, best_v, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, three, gt);

        const __m256d is_n = _mm256_cmp_pd(best, zero, _CMP_EQ_OQ);
        const __m256d is_c = _mm256_cmp_pd(best, one, _CMP_EQ_OQ);
        const __m256d is_e = _mm256_cmp_pd(best, two, _CMP_EQ_OQ);
        const __m256d is_h = _mm256_cmp_pd(best, three, _CMP_EQ_OQ);

        const __m256d cell_c = _mm256_mul_pd(w, f);
        const __m256d cell_h = _mm256_mul_pd(w, _mm256_sub_pd(f, _mm256_mul_pd(fr, rho)));
        const __m256d edge = _mm256_mul_pd(w, _mm256_mul_pd(fr, rho));

        acc_c = _mm256_add_pd(acc_c, _mm256_or_pd(select(is_c, cell_c), select(is_h, cell_h)));
        acc_e = _mm256_add_pd(acc_e, select(_mm256_or_pd(is_e, is_h), edge));
        acc_m[0] = _mm256_add_pd(acc_m[0], select(is_n, w));
        acc_m[1] = _mm256_add_pd(acc_m[1], select(is_c, w));
        acc_m[2] = _mm256_add_pd(acc_m[2], select(is_e, w));
        acc_m[3] = _mm256_add_pd(acc_m[3], select(is_h, w));

        if (labels) store_labels(labels + i, best);
    }

    double n_c[kLanes], n_e[kLanes], mass[4][kLanes];
    _mm256_storeu_pd(n_c, acc_c);
    _mm256_storeu_pd(n_e, acc_e);
    for (std::size_t k = 0; k < 4; ++k) _mm256_storeu_pd(mass[k], acc_m[k]);

    // Tail: same arithmetic as the scalar reference, into the matching lanes.
    if (body < n) {
        TypeView tail = types;
        tail.f += body;
        tail.r += body;
        if (tail.weight) tail.weight += body;
        tail.size = n - body;
        for (std::size_t i = 0; i < tail.size; ++i) {
            const double f = tail.f[i];
            const double r = tail.r[i];
            const double w = tail.weight ? tail.weight[i] : 1.0;
            const double fr = f * r;
            const double vc = c.delta1 * f - c.phi1;
            const double ve = c.delta2 * fr - c.phi2;
            const double vh = c.delta2 * fr + c.delta1 * f - (c.delta1 * c.rho) * fr - c.phi1 - c.phi2;
            int best = 0;
            double best_v = 0.0;
            if (vc > best_v) { best = 1; best_v = vc; }
            if (ve > best_v) { best = 2; best_v = ve; }
            if (vh > best_v) { best = 3; }
            n_c[i] += best == 1 ? w * f : best == 3 ? w * (f - fr * c.rho) : 0.0;
            n_e[i] += best >= 2 ? w * (fr * c.rho) : 0.0;
            mass[best][i] += w;
            if (labels) labels[body + i] = static_cast<Membership>(best);
        }
    }

    ClassifyTotals out;
    out.n_c = fold(n_c);
    out.n_e = fold(n_e);
    for (std::size_t k = 0; k < 4; ++k) out.mass[k] = fold(mass[k]);
    return out;
}

std::array<double, 2> loads(const double* f, const double* r, const Membership* labels, std::size_t n,
                            double rho) {
    const __m256d vrho = _mm256_set1_pd(rho);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d three = _mm256_set1_pd(3.0);
    __m256d acc_c = _mm256_setzero_pd();
    __m256d acc_e = _mm256_setzero_pd();

    const std::size_t body = n - n % kLanes;
    for (std::size_t i = 0; i < body; i += kLanes) {
        const __m256d vf = _mm256_loadu_pd(f + i);
        const __m256d fr = _mm256_mul_pd(vf, _mm256_loadu_pd(r + i));
        const __m256d lab = load_labels(labels + i);
        const __m256d is_c = _mm256_cmp_pd(lab, one, _CMP_EQ_OQ);
        const __m256d is_e = _mm256_cmp_pd(lab, two, _CMP_EQ_OQ);
        const __m256d is_h = _mm256_cmp_pd(lab, three, _CMP_EQ_OQ);
        const __m256d edge = _mm256_mul_pd(fr, vrho);
        acc_c = _mm256_add_pd(
            acc_c, _mm256_or_pd(select(is_c, vf), select(is_h, _mm256_sub_pd(vf, edge))));
        acc_e = _mm256_add_pd(acc_e, select(_mm256_or_pd(is_e, is_h), edge));
    }

    double n_c[kLanes], n_e[kLanes];
    _mm256_storeu_pd(n_c, acc_c);
    _mm256_storeu_pd(n_e, acc_e);
    for (std::size_t i = body; i < n; ++i) {
        const std::size_t lane = i % kLanes;
        const double fr = f[i] * r[i];
        const auto m = labels[i];
        n_c[lane] += m == Membership::CellSp     ? f[i]
                     : m == Membership::HybridSp ? f[i] - fr * rho
                                                 : 0.0;
        n_e[lane] += (m == Membership::EdgeSp || m == Membership::HybridSp) ? fr * rho : 0.0;
    }
    return {fold(n_c), fold(n_e)};
}

} // namespace edgesp::simd::avx2
