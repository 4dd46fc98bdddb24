#pragma once

#include "psido/metric/geometry.hpp"
#include "psido/metric/metric_field.hpp"
#include "psido/metric/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace psido {

struct SlowVariationFit {
    double C = 0.0;
    double r = 0.0;
    bool pass = false;
};

struct TemperanceFit {
    double C = 0.0;
    int N = 0;
    bool pass = false;
};

struct AxiomReport {
    std::string metric;
    SlowVariationFit slow_variation;
    TemperanceFit temperance;
    bool uncertainty = false;
    std::optional<TemperanceFit> geodesic_temperance;
    int samples_used = 0;

    bool all_pass() const
    {
        return slow_variation.pass && temperance.pass && uncertainty &&
               (!geodesic_temperance || geodesic_temperance->pass);
    }
};

struct WeightReport {
    std::string metric;
    std::string weight;
    SlowVariationFit slow_variation;
    TemperanceFit temperance;
    int samples_used = 0;

    bool pass() const { return slow_variation.pass && temperance.pass; }
};

namespace detail {

/// One sampled ordered pair reduced to the quantities every fit needs.
struct PairTerms {
    double premise = 0.0;      // g_X(X - Y)
    double log_ratio = 0.0;    // log of sup_T (g_X(T)/g_Y(T))^{+-1}, or of (M_X/M_Y)^{+-1}
    double log_base = 0.0;     // log(1 + g^sigma_X(X - Y))
};

inline SlowVariationFit fit_slow_variation(const std::vector<PairTerms>& terms, const std::vector<double>& r_grid,
                                           const ConstantGrid& grid)
{
    std::vector<double> rs = r_grid;
    std::sort(rs.begin(), rs.end(), std::greater<>());
    for (double r : rs) {
        double worst = 0.0;
        for (const auto& t : terms) {
            if (t.premise <= r * r) {
                worst = std::max(worst, t.log_ratio);
            }
        }
        const double c = power_of_two_at_least(worst, grid.max_log2_c);
        if (c > 0.0) {
            return {c, r, true};
        }
    }
    return {std::ldexp(1.0, grid.max_log2_c), rs.empty() ? 0.0 : rs.back(), false};
}

inline TemperanceFit fit_temperance(const std::vector<PairTerms>& terms, const ConstantGrid& grid)
{
    for (int n = 0; n <= grid.max_n; ++n) {
        double worst = 0.0;
        for (const auto& t : terms) {
            worst = std::max(worst, t.log_ratio - n * t.log_base);
        }
        const double c = power_of_two_at_least(worst, grid.max_log2_c);
        if (c > 0.0) {
            return {c, n, true};
        }
    }
    return {std::ldexp(1.0, grid.max_log2_c), grid.max_n, false};
}

inline double log_form_ratio(const QuadForm& a, const QuadForm& b)
{
    const FormRatio fr = form_ratio(a, b);
    return std::max(std::log(fr.max), -std::log(fr.min));
}

} // namespace detail

/// Fits the structure constants of `metric` on the sampled pairs. Form
/// inequalities over all directions T are evaluated exactly through
/// generalized eigenvalues. Both orders of each pair are used.
inline AxiomReport check_axioms(const MetricField& metric, const std::vector<PointPair>& samples,
                                const std::vector<double>& r_grid = ConstantGrid::default_r_grid(),
                                const ConstantGrid& grid = {})
{
    AxiomReport report;
    report.metric = metric.label();
    report.samples_used = static_cast<int>(samples.size());
    std::vector<detail::PairTerms> terms;
    terms.reserve(2 * samples.size());
    bool uncertainty = true;
    for (const auto& [x, y] : samples) {
        const QuadForm gx = metric.at(x);
        const QuadForm gy = metric.at(y);
        const QuadForm gsx = symplectic_dual(gx);
        const QuadForm gsy = symplectic_dual(gy);
        const double lr = detail::log_form_ratio(gx, gy);
        const Point d = x - y;
        terms.push_back({gx(d), lr, std::log1p(gsx(d))});
        terms.push_back({gy(d), lr, std::log1p(gsy(d))});
        uncertainty = uncertainty && std::sqrt(form_ratio(gsx, gx).min) >= 1.0 - 1e-9 &&
                      std::sqrt(form_ratio(gsy, gy).min) >= 1.0 - 1e-9;
    }
    report.slow_variation = detail::fit_slow_variation(terms, r_grid, grid);
    report.temperance = detail::fit_temperance(terms, grid);
    report.uncertainty = uncertainty;
    return report;
}

/// Admissibility of a weight: slow variation and temperance of M with
/// respect to g.
inline WeightReport check_weight(const MetricField& metric, const Weight& m, const std::vector<PointPair>& samples,
                                 const std::vector<double>& r_grid = ConstantGrid::default_r_grid(),
                                 const ConstantGrid& grid = {})
{
    WeightReport report;
    report.metric = metric.label();
    report.weight = m.label();
    report.samples_used = static_cast<int>(samples.size());
    std::vector<detail::PairTerms> terms;
    terms.reserve(2 * samples.size());
    for (const auto& [x, y] : samples) {
        const QuadForm gx = metric.at(x);
        const QuadForm gy = metric.at(y);
        const double lr = std::abs(std::log(m(x)) - std::log(m(y)));
        const Point d = x - y;
        terms.push_back({gx(d), lr, std::log1p(symplectic_dual(gx)(d))});
        terms.push_back({gy(d), lr, std::log1p(symplectic_dual(gy)(d))});
    }
    report.slow_variation = detail::fit_slow_variation(terms, r_grid, grid);
    report.temperance = detail::fit_temperance(terms, grid);
    return report;
}

} // namespace psido
