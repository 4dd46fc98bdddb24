#pragma once

#include "psido/metric/sampling.hpp"
#include "psido/quantize/weyl.hpp"
#include "psido/symbols/partition.hpp"
#include "psido/symbols/registry.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace psido {

struct OpSeminormOptions {
    int extra_directions = 2;
    std::uint64_t seed = 42;
    std::size_t center_stride = 1;
    /// Only centers with Euclidean |Y| <= center_radius enter the sup.
    double center_radius = std::numeric_limits<double>::infinity();
    double norm_tol = 1e-9;   // power-iteration stopping tolerance
};

struct OpSeminormResult {
    double value = 0.0;
    std::vector<double> orders;   // entry l: sup term with l commutators
    int centers_used = 0;
};

/// Operator-side seminorms: sup over family centers Y and g_Y-unit probes
/// T of M(Y)^{-1} ||theta_Y^w ad(L_T^w)^l a^w|| for l <= k, where
/// L_T(X) = [X, T] = t xi - tau x is the linear form dual to T = (t, tau).
/// The commutators act on a^w before the localization; both linear
/// operators x^w and xi^w are exact on the grid.
inline OpSeminormResult op_seminorm_report(const SymbolGrid& a, const Weight& m, const MetricField& metric,
                                           const ConfinedFamily& family, int k, const OpSeminormOptions& opts = {})
{
    if (k < 0 || k > 2) {
        throw Error(ErrorKind::Precondition, "op_seminorm supports 0 <= k <= 2");
    }
    if (a.d() != 1) {
        throw Error(ErrorKind::DimensionMismatch, "op_seminorm is implemented for scalar symbols");
    }
    const PhaseGrid& grid = a.grid();
    require_same_grid(grid, family.grid());
    if (metric.label() != family.metric().label()) {
        throw Error(ErrorKind::Precondition, "family was built for metric '" + family.metric().label() + "'");
    }
    const CMatrix A = weyl_quantize(a).matrix();
    const CMatrix X = weyl_quantize(symbols::sample("x", grid)).matrix();
    const CMatrix Xi = weyl_quantize(symbols::sample("xi", grid)).matrix();
    // ad(L_T) = t ad(xi^w) - tau ad(x^w); basis commutators up to order 2.
    const CMatrix cx = linalg::commutator(X, A);
    const CMatrix cxi = linalg::commutator(Xi, A);
    CMatrix cxx;
    CMatrix cxxi;
    CMatrix cxix;
    CMatrix cxixi;
    if (k >= 2) {
        cxx = linalg::commutator(X, cx);
        cxxi = linalg::commutator(X, cxi);
        cxix = linalg::commutator(Xi, cx);
        cxixi = linalg::commutator(Xi, cxi);
    }
    const auto dirs = probe_directions(2, opts.extra_directions, opts.seed);
    OpSeminormResult out;
    out.orders.assign(k + 1, 0.0);
    for (std::size_t i = 0; i < family.size(); i += std::max<std::size_t>(opts.center_stride, 1)) {
        if (family.center(i).norm() > opts.center_radius) {
            continue;
        }
        const SymbolGrid theta = family.member(i);
        if (boundary_mass_fraction(theta) > 1e-6) {
            continue;   // member reaches the xi-boundary: skip rather than alias
        }
        ++out.centers_used;
        const Point& y = family.center(i);
        const CMatrix th = weyl_quantize(theta).matrix();
        const double my = m(y);
        out.orders[0] = std::max(out.orders[0], linalg::product_norm(th, A, opts.norm_tol) / my);
        if (k == 0) {
            continue;
        }
        const RealMatrix s = family.form(i).inv_sqrt_matrix();
        for (const auto& u : dirs) {
            const Eigen::Vector2d T = s * u;
            const double t = T(0);
            const double tau = T(1);
            const CMatrix first = t * cxi - tau * cx;
            out.orders[1] = std::max(out.orders[1], linalg::product_norm(th, first, opts.norm_tol) / my);
            if (k >= 2) {
                const CMatrix second = t * t * cxixi - t * tau * (cxix + cxxi) + tau * tau * cxx;
                out.orders[2] = std::max(out.orders[2], linalg::product_norm(th, second, opts.norm_tol) / my);
            }
        }
    }
    if (out.centers_used == 0) {
        throw Error(ErrorKind::Resolution, "every family member reaches the xi-boundary; L^w would alias");
    }
    out.value = *std::max_element(out.orders.begin(), out.orders.end());
    return out;
}

inline double op_seminorm(const SymbolGrid& a, const Weight& m, const MetricField& metric,
                          const ConfinedFamily& family, int k, const OpSeminormOptions& opts = {})
{
    return op_seminorm_report(a, m, metric, family, k, opts).value;
}

} // namespace psido
