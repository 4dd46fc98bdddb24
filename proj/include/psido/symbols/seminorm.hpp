#pragma once

#include "psido/metric/geometry.hpp"
#include "psido/metric/metric_field.hpp"
#include "psido/metric/sampling.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace psido {

struct SeminormOptions {
    int extra_directions = 8;   // random probes on top of the basis
    std::uint64_t seed = 42;
    int stride = 1;             // node subsampling of the sup
    double step_fraction = 0.125;
};

namespace detail {

/// Off-grid evaluation by tensor 4-point Lagrange interpolation.
class BicubicSampler {
public:
    explicit BicubicSampler(const SymbolGrid& a)
        : a_(a)
    {
    }

    /// Value at (x, xi), or nullopt when the 4x4 stencil leaves the grid.
    std::optional<CMatrix> operator()(double x, double xi) const
    {
        const PhaseGrid& g = a_.grid();
        const double tx = (x + g.lx()) / g.dx();
        const double txi = (xi + g.lxi()) / g.dxi();
        const int px = static_cast<int>(std::floor(tx)) - 1;
        const int pl = static_cast<int>(std::floor(txi)) - 1;
        if (px < 0 || pl < 0 || px + 3 >= g.nx() || pl + 3 >= g.nxi()) {
            return std::nullopt;
        }
        const auto wx = weights(tx - px);
        const auto wl = weights(txi - pl);
        const int d = a_.d();
        CMatrix out = CMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const CMatrix& plane = a_.plane(i, j);
                cplx s = 0.0;
                for (int u = 0; u < 4; ++u) {
                    cplx row = 0.0;
                    for (int v = 0; v < 4; ++v) {
                        row += wl[v] * plane(px + u, pl + v);
                    }
                    s += wx[u] * row;
                }
                out(i, j) = s;
            }
        }
        return out;
    }

private:
    // Lagrange weights for nodes 0..3 at position t (t in [1, 2]).
    static std::array<double, 4> weights(double t)
    {
        std::array<double, 4> w{};
        for (int k = 0; k < 4; ++k) {
            double num = 1.0;
            double den = 1.0;
            for (int m = 0; m < 4; ++m) {
                if (m != k) {
                    num *= t - m;
                    den *= k - m;
                }
            }
            w[k] = num / den;
        }
        return w;
    }

    const SymbolGrid& a_;
};

inline double fiber_norm(const CMatrix& m)
{
    if (m.size() == 1) {
        return std::abs(m(0, 0));
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Norms of a^{(l)}(X; v, ..., v) for l = 1..k (k <= 4) by central
/// differences with unit spacing along the step vector v. Returns nullopt
/// when a stencil point leaves the grid.
inline std::optional<std::array<double, 5>> directional_norms(const BicubicSampler& sampler, const CMatrix& center,
                                                              const Point& X, const Eigen::Vector2d& v, int k)
{
    std::array<double, 5> out{};
    if (k == 0) {
        return out;
    }
    const int reach = k <= 2 ? 1 : 2;
    std::array<CMatrix, 5> f;
    f[2] = center;
    for (int s = -reach; s <= reach; ++s) {
        if (s == 0) {
            continue;
        }
        auto val = sampler(X(0) + s * v(0), X(1) + s * v(1));
        if (!val) {
            return std::nullopt;
        }
        f[s + 2] = std::move(*val);
    }
    out[1] = fiber_norm(0.5 * (f[3] - f[1]));
    if (k >= 2) {
        out[2] = fiber_norm(f[3] - 2.0 * f[2] + f[1]);
    }
    if (k >= 3) {
        out[3] = fiber_norm(0.5 * (f[4] - 2.0 * f[3] + 2.0 * f[1] - f[0]));
    }
    if (k >= 4) {
        out[4] = fiber_norm(f[4] - 4.0 * f[3] + 6.0 * f[2] - 4.0 * f[1] + f[0]);
    }
    return out;
}

/// Length of a step vector in grid cells.
inline double cells(const PhaseGrid& grid, const Eigen::Vector2d& v)
{
    return std::hypot(v(0) / grid.dx(), v(1) / grid.dxi());
}

inline void require_order(int k)
{
    if (k < 0 || k > 4) {
        throw Error(ErrorKind::Precondition, "finite-difference seminorms support 0 <= k <= 4");
    }
}

inline void require_resolved(const PhaseGrid& grid, const Eigen::Vector2d& v)
{
    if (cells(grid, v) < 2.0 * (1.0 - 1e-9)) {
        throw Error(ErrorKind::Resolution,
                    "grid too coarse: derivative step spans fewer than 2 cells; refine the grid");
    }
}

} // namespace detail

/// Per-order terms of the S(M, g) seminorm: entry l is
/// sup_X sup_T ||a^{(l)}(X; T, ..., T)|| / M(X) over g_X-unit probes T,
/// taken over interior nodes.
inline std::vector<double> seminorm_orders(const SymbolGrid& a, const Weight& m, const MetricField& metric, int k,
                                           const SeminormOptions& opts = {})
{
    detail::require_order(k);
    const PhaseGrid& grid = a.grid();
    const detail::BicubicSampler sampler(a);
    const auto dirs = probe_directions(2, opts.extra_directions, opts.seed);
    std::vector<double> out(k + 1, 0.0);
    for (int p = 0; p < grid.nx(); p += opts.stride) {
        for (int l = 0; l < grid.nxi(); l += opts.stride) {
            if (!grid.in_interior(p, l)) {
                continue;
            }
            const Point X = grid.point(p, l);
            const double mx = m(X);
            const CMatrix center = a.at(p, l);
            out[0] = std::max(out[0], detail::fiber_norm(center) / mx);
            if (k == 0) {
                continue;
            }
            const RealMatrix s = metric.at(X).inv_sqrt_matrix();
            for (const auto& u : dirs) {
                const Eigen::Vector2d v = opts.step_fraction * (s * u);
                detail::require_resolved(grid, v);
                const auto norms = detail::directional_norms(sampler, center, X, v, k);
                if (!norms) {
                    continue;
                }
                for (int q = 1; q <= k; ++q) {
                    out[q] = std::max(out[q], (*norms)[q] / std::pow(opts.step_fraction, q) / mx);
                }
            }
        }
    }
    return out;
}

inline double seminorm_S(const SymbolGrid& a, const Weight& m, const MetricField& metric, int k,
                         const SeminormOptions& opts = {})
{
    const auto terms = seminorm_orders(a, m, metric, k, opts);
    return *std::max_element(terms.begin(), terms.end());
}

/// Confinement norm of a in U_{Y,r}: sup over interior X and l <= k of
/// ||a^{(l)}(X; T..T)|| (1 + g^sigma_Y(X - U_{Y,r}))^{k/2} with g_Y(T) = 1.
inline double confinement_norm(const SymbolGrid& a, const Point& Y, double r, const MetricField& metric, int k,
                               const SeminormOptions& opts = {})
{
    detail::require_order(k);
    const PhaseGrid& grid = a.grid();
    const QuadForm gy = metric.at(Y);
    const QuadForm gsy = symplectic_dual(gy);
    const detail::Whitening wh(gsy);
    const detail::Ellipsoid ball(wh.to(Y), wh.shape(gy), r);
    const detail::BicubicSampler sampler(a);
    const RealMatrix s = gy.inv_sqrt_matrix();
    std::vector<Eigen::Vector2d> steps;
    for (const auto& u : probe_directions(2, opts.extra_directions, opts.seed)) {
        steps.emplace_back(opts.step_fraction * r * (s * u));
        if (k > 0) {
            detail::require_resolved(grid, steps.back());
        }
    }
    double best = 0.0;
    for (int p = 0; p < grid.nx(); p += opts.stride) {
        for (int l = 0; l < grid.nxi(); l += opts.stride) {
            if (!grid.in_interior(p, l)) {
                continue;
            }
            const Point X = grid.point(p, l);
            const Eigen::VectorXd z = wh.to(X);
            const double dist = (z - ball.project(z)).squaredNorm();
            const double w = std::pow(1.0 + dist, 0.5 * k);
            const CMatrix center = a.at(p, l);
            double local = detail::fiber_norm(center);
            for (const auto& v : steps) {
                if (k == 0) {
                    break;
                }
                const auto norms = detail::directional_norms(sampler, center, X, v, k);
                if (!norms) {
                    continue;
                }
                for (int q = 1; q <= k; ++q) {
                    local = std::max(local, (*norms)[q] / std::pow(opts.step_fraction * r, q));
                }
            }
            best = std::max(best, local * w);
        }
    }
    return best;
}

} // namespace psido
