#pragma once

#include "psido/metric/geometry.hpp"
#include "psido/quantize/weyl.hpp"

#include <cmath>
#include <vector>

namespace psido {

struct ChainDecayReport {
    int nu = 0;
    std::vector<Point> centers;
    double lhs = 0.0;              // ||c_0^w ... c_nu^w|| with ||c_j^w|| = 1
    double product_of_norms = 1.0;
    double rhs_model = 0.0;        // C * prod_j delta_r(Y_j, Y_{j+1})^{-N0}
    double N0 = 0.0;
    double log_C = 0.0;
    double fit_quality = 0.0;      // rms residual of the log fit
    bool fit_undefined = false;
    /// (sum of log delta_r over the links, log of the product norm) for every
    /// contiguous sub-chain with at least one link.
    std::vector<std::pair<double, double>> samples;
};

struct ChainFit {
    double N0 = 0.0;
    double log_C = 0.0;
    double rms = 0.0;
    bool undefined = false;
};

/// Least squares log lhs = log C - N0 * s over (s, log lhs) samples.
inline ChainFit fit_chain(const std::vector<std::pair<double, double>>& samples)
{
    ChainFit fit;
    const double n = static_cast<double>(samples.size());
    double ms = 0.0;
    double ml = 0.0;
    for (const auto& [s, l] : samples) {
        ms += s;
        ml += l;
    }
    ms /= n;
    ml /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [s, l] : samples) {
        sxx += (s - ms) * (s - ms);
        sxy += (s - ms) * (l - ml);
    }
    if (samples.size() < 2 || sxx <= 1e-12 * std::max(1.0, ms * ms)) {
        fit.undefined = true;
        return fit;
    }
    const double slope = sxy / sxx;
    fit.N0 = -slope;
    fit.log_C = ml - slope * ms;
    double rss = 0.0;
    for (const auto& [s, l] : samples) {
        const double r = l - (fit.log_C + slope * s);
        rss += r * r;
    }
    fit.rms = std::sqrt(rss / n);
    return fit;
}

/// Gaussian bump exp(-g_Y(X - Y) / (2 r^2)) quantized and scaled to unit
/// operator norm.
inline CMatrix unit_bump(const PhaseGrid& grid, const MetricField& metric, const Point& y, double r)
{
    const QuadForm g = metric.at(y);
    const SymbolGrid bump = SymbolGrid::sample(
        [&](double x, double xi) { return cplx(std::exp(-g(point2(x, xi) - y) / (2.0 * r * r))); }, grid);
    CMatrix m = weyl_quantize(bump).matrix();
    const double nrm = linalg::operator_norm(m);
    if (nrm == 0.0) {
        throw Error(ErrorKind::NumericFailure, "confined bump vanishes on the grid");
    }
    return m / nrm;
}

/// Product norms of unit confined bumps along a chain of centers and a
/// power-law fit against the delta_r separations of consecutive centers.
inline ChainDecayReport confined_chain_decay(const std::vector<Point>& centers, const MetricField& metric, double r,
                                             const PhaseGrid& grid, const DeltaOptions& delta = {})
{
    if (centers.size() < 2 || centers.size() > 9) {
        throw Error(ErrorKind::Precondition, "chain needs 1 <= nu <= 8");
    }
    for (const auto& y : centers) {
        if (!grid.contains(y(0), y(1))) {
            throw Error(ErrorKind::OutsideBox, "chain center outside the grid box");
        }
    }
    ChainDecayReport rep;
    rep.nu = static_cast<int>(centers.size()) - 1;
    rep.centers = centers;
    std::vector<CMatrix> bumps;
    for (const auto& y : centers) {
        bumps.push_back(unit_bump(grid, metric, y, r));
    }
    std::vector<double> log_delta;
    for (std::size_t j = 0; j + 1 < centers.size(); ++j) {
        log_delta.push_back(std::log(delta_r(metric, centers[j], centers[j + 1], r, delta).value));
    }
    bool all_overlap = true;
    for (double v : log_delta) {
        all_overlap = all_overlap && v <= 1e-12;
    }
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        CMatrix prod = bumps[i];
        double s = 0.0;
        for (std::size_t j = i + 1; j < bumps.size(); ++j) {
            prod = prod * bumps[j];
            s += log_delta[j - 1];
            const double nrm = linalg::operator_norm(prod);
            rep.samples.emplace_back(s, std::log(std::max(nrm, 1e-300)));
            if (i == 0 && j + 1 == bumps.size()) {
                rep.lhs = nrm;
            }
        }
    }
    const ChainFit fit = fit_chain(rep.samples);
    rep.fit_undefined = all_overlap || fit.undefined;
    if (!rep.fit_undefined) {
        rep.N0 = fit.N0;
        rep.log_C = fit.log_C;
        rep.fit_quality = fit.rms;
        double s = 0.0;
        for (double v : log_delta) {
            s += v;
        }
        rep.rhs_model = std::exp(fit.log_C - fit.N0 * s);
    }
    return rep;
}

} // namespace psido
