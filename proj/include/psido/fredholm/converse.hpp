#pragma once

#include "psido/fredholm/conjugation.hpp"
#include "psido/fredholm/index.hpp"
#include "psido/fredholm/riesz.hpp"
#include "psido/symbols/ellipticity.hpp"

#include <optional>
#include <string>

namespace psido {

struct ConverseOptions {
    IndexOptions index = [] {
        IndexOptions o;
        // the kernel of a zeroth-order symbol is only resolved to ~1e-6 at N_x = 128
        o.rank_tol = 1e-5;
        return o;
    }();
    double K_radius = 1.0;
    double away_radius = 3.0;      // c # a* # a - 1 is measured for |X| >= this
    int projector_nx = 256;        // truncation used for the Riesz step
};

struct ConverseReport {
    IndexReport index;
    std::string gap_failure;       // why no stable gap was found
    EllipticityReport ellipticity;
    bool fredholm = false;         // stable gap and stable index
    bool elliptic = false;
    bool inconclusive = false;     // no stable gap: neither direction asserted
    std::optional<bool> biconditional;
    // Fredholm instances only
    std::optional<RieszProjector> projector;
    double residual_away = 0.0;    // max |c # a* # a - 1| for |X| >= away_radius
    double residual_near = 0.0;    // same for |X| < away_radius
};

/// Fredholmness (stable spectral gap and index across truncations) against
/// ellipticity with M = 1. For Fredholm instances also builds c = (B + a*a)^{-1}
/// from the kernel projector B, so that c a* a = I - c B.
inline ConverseReport converse_experiment(const SymbolBuilder& a, const MetricField& metric, double lx,
                                          const std::vector<int>& truncations, const ConverseOptions& opts = {})
{
    ConverseReport rep;
    IndexScan scan = index_scan([&](int nx) { return weyl_quantize(a(PhaseGrid::fourier(lx, nx))); }, truncations,
                                opts.index);
    rep.index = std::move(scan.report);
    rep.gap_failure = std::move(scan.gap_failure);
    const PhaseGrid largest = PhaseGrid::fourier(lx, truncations.back());
    rep.ellipticity = check_elliptic(a(largest), weights::one(metric.n()), opts.K_radius);
    rep.elliptic = rep.ellipticity.pass;
    rep.inconclusive = !rep.index.gap_stable;
    rep.fredholm = rep.index.stable;
    if (rep.inconclusive) {
        return rep;
    }
    rep.biconditional = rep.fredholm == rep.elliptic;
    if (!rep.fredholm) {
        return rep;
    }
    int nx = truncations.back();
    for (int t : truncations) {
        if (t == opts.projector_nx) {
            nx = t;
        }
    }
    const PhaseGrid grid = PhaseGrid::fourier(lx, nx);
    const OperatorMatrix A = weyl_quantize(a(grid));
    const TruncationIndex* at = nullptr;
    for (const auto& t : rep.index.truncations) {
        if (t.nx == nx) {
            at = &t;
        }
    }
    const double radius = std::min(1.0, 0.5 * at->sigma_gap * at->sigma_gap);
    rep.projector = riesz_projector(A, radius);
    const OperatorMatrix AA = A.adjoint() * A;
    const OperatorMatrix P = AA + A.like(rep.projector->B);
    const SymbolInverse c = symbol_inverse_full(dequantize(P));
    const SymbolGrid residual = dequantize(c.op * AA) - SymbolGrid::constant(grid, A.d());
    for (int p = 0; p < grid.nx(); ++p) {
        for (int l = 0; l < grid.nxi(); ++l) {
            if (!grid.in_interior(p, l)) {
                continue;
            }
            const double v = detail::fiber_norm(residual.at(p, l));
            if (grid.point(p, l).norm() >= opts.away_radius) {
                rep.residual_away = std::max(rep.residual_away, v);
            } else {
                rep.residual_near = std::max(rep.residual_near, v);
            }
        }
    }
    return rep;
}

} // namespace psido
