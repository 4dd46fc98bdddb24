#pragma once

#include "psido/metric/metric_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace psido {

using PointPair = std::pair<Point, Point>;

/// Axis-aligned sampling box centred at the origin.
struct SampleBox {
    Eigen::VectorXd half_width;

    static SampleBox cube(int dim, double h) { return {Eigen::VectorXd::Constant(dim, h)}; }
    int dim() const { return static_cast<int>(half_width.size()); }
};

/// Unit probe directions: the canonical basis plus `extra` seeded random
/// unit vectors.
inline std::vector<Eigen::VectorXd> probe_directions(int dim, int extra = 8, std::uint64_t seed = 42)
{
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < dim; ++i) {
        out.push_back(Eigen::VectorXd::Unit(dim, i));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int k = 0; k < extra; ++k) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) {
            v(i) = normal(rng);
        }
        out.push_back(v.normalized());
    }
    return out;
}

/// Sample pairs in `box`. A fraction of the pairs are local: Y lies in the
/// g_X-ball of radius `local_radius` around X, so slow-variation premises
/// are exercised (shortened to stay in the box); the rest are independent uniform pairs.
inline std::vector<PointPair> sample_pairs(const MetricField& metric, const SampleBox& box, int count,
                                           std::uint64_t seed, double local_fraction = 0.5,
                                           double local_radius = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> radial(0.0, 1.0);
    std::normal_distribution<double> normal;
    auto uniform_point = [&]() {
        Point p(box.dim());
        for (int i = 0; i < box.dim(); ++i) {
            p(i) = box.half_width(i) * unit(rng);
        }
        return p;
    };
    const int local = static_cast<int>(std::lround(local_fraction * count));
    std::vector<PointPair> pairs;
    pairs.reserve(count);
    for (int k = 0; k < count; ++k) {
        Point x = uniform_point();
        if (k < local) {
            Eigen::VectorXd dir(box.dim());
            for (int i = 0; i < box.dim(); ++i) {
                dir(i) = normal(rng);
            }
            dir.normalize();
            Eigen::VectorXd step = local_radius * radial(rng) * (metric.at(x).inv_sqrt_matrix() * dir);
            // Large balls are shortened to stay in the box; the pair stays inside the ball.
            double shrink = 1.0;
            for (int i = 0; i < box.dim(); ++i) {
                const double room = box.half_width(i) - std::abs(x(i));
                if (std::abs(step(i)) > room && std::abs(step(i)) > 0.0) {
                    shrink = std::min(shrink, std::max(room, 0.0) / std::abs(step(i)));
                }
            }
            Point y = x + shrink * step;
            pairs.emplace_back(std::move(x), std::move(y));
        } else {
            pairs.emplace_back(std::move(x), uniform_point());
        }
    }
    return pairs;
}

/// Candidate grids for constant fitting.
struct ConstantGrid {
    int max_log2_c = 20;   // C in {2^k : 0 <= k <= 20}
    int max_n = 16;        // N in {0..16}
    static std::vector<double> default_r_grid()
    {
        std::vector<double> r;
        for (int k = 0; k <= 8; ++k) {
            r.push_back(std::ldexp(1.0, -k));
        }
        return r;
    }
};

namespace detail {

/// Smallest power of two >= exp(log_value), or -1 when above the grid.
inline double power_of_two_at_least(double log_value, int max_log2)
{
    const double k = std::max(0.0, std::ceil(log_value / std::log(2.0) - 1e-12));
    if (k > max_log2) {
        return -1.0;
    }
    return std::ldexp(1.0, static_cast<int>(k));
}

} // namespace detail

} // namespace psido
