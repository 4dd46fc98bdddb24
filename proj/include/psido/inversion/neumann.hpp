#pragma once

#include "psido/quantize/weyl.hpp"
#include "psido/symbols/seminorm.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace psido {

struct NeumannOptions {
    double tol = 1e-12;
    long long m_cap = 1LL << 40;
    /// Powers m = 1..trace_terms get a symbol-side seminorm trace.
    int trace_terms = 6;
    int trace_k = 2;
    int trace_stride = 2;
    /// Metric for the traces; empty picks planck-h adapted to the grid
    /// (unit ball radius 16 max(dx, dxi)).
    std::optional<MetricField> trace_metric;
};

struct NeumannReport {
    long long m_star = 0;          // smallest m with eps^{m+1}/(1-eps) <= tol
    long long m_max = 0;           // last power actually summed
    bool doubling = false;         // summed as prod_k (I + R^{2^k})
    double operator_contraction = 0.0;
    std::vector<double> tail_bound;                 // eps^{m+1}/(1-eps), m = 0..trace_terms
    std::vector<double> power_norm;                 // ||R^m||, m = 1..trace_terms
    std::vector<std::array<double, 3>> seminorm_trace;  // per m = 1..trace_terms, k = 0..2
    std::array<double, 3> fitted_ratio{0.0, 0.0, 0.0};
    std::string trace_metric;
    bool converged = false;
};

/// Grid-adapted semiclassical metric: g = h |dX|^2 with h^{-1/2} = 16
/// max(dx, dxi), so that derivative steps of radius/8 span two cells.
inline MetricField grid_trace_metric(const PhaseGrid& grid)
{
    const double radius = 16.0 * std::max(grid.dx(), grid.dxi());
    return metrics::planck_h(1.0 / (radius * radius));
}

namespace detail {

/// Slope of log t_m against m (m = 1, 2, ...) by least squares, returned
/// as exp(slope). Zero when the sequence hits zero; NaN with fewer than two
/// terms.
inline double geometric_ratio(const std::vector<double>& t)
{
    if (t.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    for (double v : t) {
        if (!(v > 0.0)) {
            return 0.0;
        }
    }
    const double n = static_cast<double>(t.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t m = 0; m < t.size(); ++m) {
        mx += m + 1.0;
        my += std::log(t[m]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t m = 0; m < t.size(); ++m) {
        sxx += (m + 1.0 - mx) * (m + 1.0 - mx);
        sxy += (m + 1.0 - mx) * (std::log(t[m]) - my);
    }
    return std::exp(sxy / sxx);
}

} // namespace detail

/// (I - R)^{-1} = sum_m R^m on the operator side, with ||R|| < 1 measured.
/// The number of terms follows from the tail bound; long series are summed
/// through the doubling product, which equals the partial sum up to
/// 2^K - 1 >= m*.
inline std::pair<OperatorMatrix, NeumannReport> neumann_operator(const OperatorMatrix& r, const NeumannOptions& opts = {})
{
    NeumannReport rep;
    const double eps = r.norm();
    rep.operator_contraction = eps;
    if (!(eps < 1.0)) {
        throw Error(ErrorKind::ContractionViolated,
                    "Neumann series needs ||r^w|| < 1, measured " + std::to_string(eps));
    }
    if (eps == 0.0) {
        rep.m_star = 0;
    } else {
        const double need = std::log(opts.tol * (1.0 - eps)) / std::log(eps) - 1.0;
        rep.m_star = std::max<long long>(0, static_cast<long long>(std::ceil(std::max(need, 0.0))));
        if (!(need < static_cast<double>(opts.m_cap))) {
            throw Error(ErrorKind::NotConverged, "Neumann series needs more than m_cap = " +
                                                     std::to_string(opts.m_cap) + " terms");
        }
    }
    for (int m = 0; m <= opts.trace_terms; ++m) {
        rep.tail_bound.push_back(std::pow(eps, m + 1) / (1.0 - eps));
    }
    const Eigen::Index n = r.size();
    const CMatrix id = CMatrix::Identity(n, n);
    CMatrix sum;
    if (rep.m_star <= 64) {
        rep.m_max = rep.m_star;
        sum = id;
        CMatrix power = id;
        for (long long m = 1; m <= rep.m_star; ++m) {
            power = power * r.matrix();
            sum += power;
        }
    } else {
        rep.doubling = true;
        sum = id;
        CMatrix power = r.matrix();
        long long reached = 0;   // sum holds powers 0 .. reached
        while (reached < rep.m_star) {
            sum = sum + power * sum;   // (I + R^{reached+1}) * sum
            reached = 2 * reached + 1;
            power = power * power;
        }
        rep.m_max = reached;
    }
    // Traces of the first powers, de-quantized per term.
    const MetricField metric = opts.trace_metric ? *opts.trace_metric : grid_trace_metric(r.grid());
    rep.trace_metric = metric.label();
    std::array<std::vector<double>, 3> per_k;
    CMatrix power = id;
    for (int m = 1; m <= opts.trace_terms; ++m) {
        power = power * r.matrix();
        rep.power_norm.push_back(linalg::operator_norm(power));
        const SymbolGrid sym = dequantize(r.like(power));
        const auto orders =
            seminorm_orders(sym, weights::one(), metric, opts.trace_k, {.stride = opts.trace_stride});
        std::array<double, 3> t{0.0, 0.0, 0.0};
        double running = 0.0;
        for (int k = 0; k <= opts.trace_k && k <= 2; ++k) {
            running = std::max(running, orders[k]);
            t[k] = running;
            per_k[k].push_back(running);
        }
        rep.seminorm_trace.push_back(t);
    }
    bool ratios_ok = true;
    for (int k = 0; k <= std::min(opts.trace_k, 2); ++k) {
        if (per_k[k].empty()) {
            continue;
        }
        rep.fitted_ratio[k] = detail::geometric_ratio(per_k[k]);
        if (!std::isnan(rep.fitted_ratio[k])) {
            ratios_ok = ratios_ok && rep.fitted_ratio[k] < 1.0;
        }
    }
    const double tail = eps == 0.0 ? 0.0 : std::pow(eps, rep.m_max + 1) / (1.0 - eps);
    rep.converged = tail <= opts.tol * (1.0 + 1e-9) && ratios_ok;
    OperatorMatrix out = r.like(std::move(sum));
    return {std::move(out), std::move(rep)};
}

/// R = 1 + sum_{m >= 1} r^{#m}, computed on the operator side and
/// de-quantized once.
inline std::pair<SymbolGrid, NeumannReport> neumann_inverse(const SymbolGrid& r, const NeumannOptions& opts = {})
{
    auto [op, rep] = neumann_operator(weyl_quantize(r), opts);
    return {dequantize(op), std::move(rep)};
}

} // namespace psido
