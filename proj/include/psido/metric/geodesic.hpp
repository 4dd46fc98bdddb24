#pragma once

#include "psido/metric/axioms.hpp"
#include "psido/metric/metric_field.hpp"
#include "psido/symbols/phase_grid.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <vector>

namespace psido {

/// Shortest paths for the g^# length on the 8-connected graph of a phase
/// grid. Edge length is the g^#-length of the edge vector with g^# taken at
/// the edge midpoint. Midpoint forms are tabulated once on the half-step
/// lattice. 8-connectivity overestimates continuum lengths by at most
/// about 1.08 (worst direction 22.5 degrees off an edge).
class GeodesicGraph {
public:
    GeodesicGraph(const MetricField& metric, const PhaseGrid& grid)
        : grid_(grid)
        , hx_(2 * grid.nx() - 1)
        , hxi_(2 * grid.nxi() - 1)
        , half_(static_cast<std::size_t>(hx_) * hxi_)
    {
        if (metric.n() != 1) {
            throw Error(ErrorKind::DimensionMismatch, "grid geodesics are implemented for n = 1");
        }
        for (int i = 0; i < hx_; ++i) {
            for (int j = 0; j < hxi_; ++j) {
                const Point mid = point2(grid.x(0) + 0.5 * i * grid.dx(), grid.xi(0) + 0.5 * j * grid.dxi());
                half_[static_cast<std::size_t>(i) * hxi_ + j] = metric.sharp_at(mid).matrix();
            }
        }
    }

    const PhaseGrid& grid() const { return grid_; }

    /// Distances from the node nearest to X to every node, x-major.
    std::vector<double> distances_from(const Point& X) const
    {
        const auto [p0, l0] = grid_.nearest(X);
        const int nx = grid_.nx();
        const int nxi = grid_.nxi();
        std::vector<double> dist(static_cast<std::size_t>(nx) * nxi, std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        dist[grid_.index(p0, l0)] = 0.0;
        queue.emplace(0.0, grid_.index(p0, l0));
        static constexpr std::array<std::array<int, 2>, 8> steps{
            {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
        while (!queue.empty()) {
            const auto [d, node] = queue.top();
            queue.pop();
            if (d > dist[node]) {
                continue;
            }
            const int p = node / nxi;
            const int l = node % nxi;
            for (const auto& s : steps) {
                const int q = p + s[0];
                const int m = l + s[1];
                if (q < 0 || q >= nx || m < 0 || m >= nxi) {
                    continue;
                }
                const RealMatrix& g = half_[static_cast<std::size_t>(p + q) * hxi_ + (l + m)];
                const Eigen::Vector2d e(s[0] * grid_.dx(), s[1] * grid_.dxi());
                const double nd = d + std::sqrt(e.dot(g * e));
                const int target = grid_.index(q, m);
                if (nd < dist[target]) {
                    dist[target] = nd;
                    queue.emplace(nd, target);
                }
            }
        }
        return dist;
    }

    double distance(const Point& X, const Point& Y) const
    {
        const auto [p, l] = grid_.nearest(Y);
        return distances_from(X)[grid_.index(p, l)];
    }

private:
    PhaseGrid grid_;
    int hx_;
    int hxi_;
    std::vector<RealMatrix> half_;
};

inline double geodesic_distance(const MetricField& metric, const Point& X, const Point& Y, const PhaseGrid& grid)
{
    return GeodesicGraph(metric, grid).distance(X, Y);
}

/// Fits (C, N) in g_X(T) <= C g_Y(T) (1 + d(X, Y))^N with d the g^#
/// geodesic distance. One Dijkstra sweep per distinct source node.
inline TemperanceFit check_geodesic_temperance(const MetricField& metric, const std::vector<PointPair>& samples,
                                               const PhaseGrid& grid, const ConstantGrid& constants = {})
{
    const GeodesicGraph graph(metric, grid);
    std::map<int, std::vector<double>> sweeps;
    std::vector<detail::PairTerms> terms;
    terms.reserve(samples.size());
    for (const auto& [x, y] : samples) {
        const auto [p, l] = grid.nearest(x);
        const int source = grid.index(p, l);
        auto it = sweeps.find(source);
        if (it == sweeps.end()) {
            it = sweeps.emplace(source, graph.distances_from(x)).first;
        }
        const auto [q, m] = grid.nearest(y);
        const double d = it->second[grid.index(q, m)];
        terms.push_back({0.0, detail::log_form_ratio(metric.at(x), metric.at(y)), std::log1p(d)});
    }
    return detail::fit_temperance(terms, constants);
}

} // namespace psido
