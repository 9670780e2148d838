#include "edgesp/simd/kernels.hpp"

namespace edgesp::simd::scalar {

namespace {

double fold(const double (&lane)[kLanes]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

} // namespace

ClassifyTotals classify(const TypeView& types, const PayoffCoefficients& c, Membership* labels) {
    const double d1rho = c.delta1 * c.rho;

    double n_c[kLanes] = {};
    double n_e[kLanes] = {};
    double mass[4][kLanes] = {};

    for (std::size_t i = 0; i < types.size; ++i) {
        const std::size_t lane = i % kLanes;
        const double f = types.f[i];
        const double r = types.r[i];
        const double w = types.weight ? types.weight[i] : 1.0;
        const double fr = f * r;

        const double vc = c.delta1 * f - c.phi1;
        const double ve = c.delta2 * fr - c.phi2;
        const double vh = c.delta2 * fr + c.delta1 * f - d1rho * fr - c.phi1 - c.phi2;

        int best = 0;
        double best_v = 0.0;
        if (vc > best_v) { best = 1; best_v = vc; }
        if (ve > best_v) { best = 2; best_v = ve; }
        if (vh > best_v) { best = 3; }

        const double cell = best == 1 ? w * f : best == 3 ? w * (f - fr * c.rho) : 0.0;
        const double edge = best >= 2 ? w * (fr * c.rho) : 0.0;
        n_c[lane] += cell;
        n_e[lane] += edge;
        mass[best][lane] += w;

        if (labels) labels[i] = static_cast<Membership>(best);
    }

    ClassifyTotals out;
    out.n_c = fold(n_c);
    out.n_e = fold(n_e);
    for (std::size_t k = 0; k < 4; ++k) out.mass[k] = fold(mass[k]);
    return out;
}

std::array<double, 2> loads(const double* f, const double* r, const Membership* labels, std::size_t n,
                            double rho) {
    double n_c[kLanes] = {};
    double n_e[kLanes] = {};
    for (std::size_t i = 0; i < n; ++i) {
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

} // namespace edgesp::simd::scalar
