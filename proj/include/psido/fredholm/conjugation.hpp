#pragma once

#include "psido/fredholm/index.hpp"
#include "psido/inversion/symbol_inverse.hpp"
#include "psido/metric/metric_field.hpp"

#include <functional>
#include <string>

namespace psido {

/// M1/M2 sampled as a scalar symbol.
inline SymbolGrid weight_ratio_symbol(const Weight& m1, const Weight& m2, const PhaseGrid& grid,
                                      const std::string& metric_label = "")
{
    SymbolGrid b = SymbolGrid::sample([&](double x, double xi) { return cplx(m1(x, xi) / m2(x, xi)); }, grid);
    b.set_labels(weights::ratio(m1, m2).label(), metric_label);
    return b;
}

struct WeightConjugators {
    SymbolGrid b1;                 // M1/M2
    SymbolGrid b2;                 // # inverse of b1
    double residual = 0.0;         // max of the two-sided residuals on the core box
    InverseReport inverse;
};

inline WeightConjugators weight_conjugators(const Weight& m1, const Weight& m2, const MetricField& metric,
                                            const PhaseGrid& grid, const InverseOptions& opts = {})
{
    SymbolGrid b1 = weight_ratio_symbol(m1, m2, grid, metric.label());
    SymbolInverse inv = symbol_inverse_full(b1, opts);
    const double residual = std::max(inv.report.residual_left, inv.report.residual_right);
    inv.symbol.set_labels(weights::ratio(m2, m1).label(), metric.label());
    return {std::move(b1), std::move(inv.symbol), residual, std::move(inv.report)};
}

using SymbolBuilder = std::function<SymbolGrid(const PhaseGrid&)>;

/// Index of a : H(M1) -> H(M1/M) through the L^2 realization of
/// c # a # b with c = M1/M and b = 1/M1, both elliptic of their orders.
/// Does not throw on a missing gap; see fredholm_check.
inline IndexScan fredholm_scan(const SymbolBuilder& a, const Weight& m, const Weight& m1, const MetricField& metric,
                               double lx, const std::vector<int>& truncations, const IndexOptions& opts = {})
{
    const Weight unit = weights::one(m.n());
    auto build = [&](int nx) {
        const PhaseGrid grid = PhaseGrid::fourier(lx, nx);
        const OperatorMatrix c = weyl_quantize(weight_ratio_symbol(m1, m, grid, metric.label()));
        const OperatorMatrix b = weyl_quantize(weight_ratio_symbol(unit, m1, grid, metric.label()));
        return c * weyl_quantize(a(grid)) * b;
    };
    return index_scan(build, truncations, opts);
}

inline IndexReport fredholm_check(const SymbolBuilder& a, const Weight& m, const Weight& m1, const MetricField& metric,
                                  double lx, const std::vector<int>& truncations, const IndexOptions& opts = {})
{
    IndexScan scan = fredholm_scan(a, m, m1, metric, lx, truncations, opts);
    if (!scan.report.gap_stable) {
        throw Error(ErrorKind::NoSpectralGap, "no stable spectral gap: " + scan.gap_failure);
    }
    return std::move(scan.report);
}

} // namespace psido
