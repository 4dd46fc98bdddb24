#pragma once

#include "psido/metric/geometry.hpp"
#include "psido/quantize/moyal.hpp"
#include "psido/symbols/ellipticity.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace psido {

struct ParametrixOptions {
    double r_min = 2.0;            // residual scan band |X| in [r_min, r_max]
    double r_max = 6.0;
    int shells = 9;
    double eps_factor = 1e-3;      // eps = eps_factor * max |a| on K, before the resolution floor
};

struct ResidualShell {
    double R = 0.0;
    double residual = 0.0;         // max |a~ # a - 1| on the shell
    double weighted = 0.0;         // max |a~ # a - 1| * lambda_g on the shell
    int nodes = 0;
};

struct ParametrixReport {
    double K_radius = 0.0;
    double blend_width = 0.0;
    double eps = 0.0;              // 0 when a is pointwise invertible on K and needs no regularization
    EllipticityReport ellipticity;
    std::vector<ResidualShell> shells;
    double sup_weighted = 0.0;     // max of residual * lambda_g over the scan band
    double decay_exponent = 0.0;   // least-squares slope of log residual against log R
    bool decreasing = false;       // decay_exponent < 0
};

struct Parametrix {
    SymbolGrid symbol;
    ParametrixReport report;
};

namespace detail {

inline double smoothstep(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

} // namespace detail

/// a~ = a^{-1} outside the annulus K <= |X| <= K + w, the Tikhonov inverse
/// (a*a + eps^2)^{-1} a* inside K, and a smoothstep blend across the annulus.
/// The xi-spacing pi/L_x caps what the grid can resolve, so w is at least 2.5
/// cells and eps at least the change of a over two cells; a symbol already
/// invertible on K (smallest fiber singular value above eps_factor * max |a|)
/// is inverted pointwise everywhere.
inline Parametrix parametrix(const SymbolGrid& a, const Weight& m, const MetricField& metric, double K_radius,
                             const ParametrixOptions& opts = {})
{
    Parametrix out{SymbolGrid(a.grid(), a.d(), a.weight_label(), a.metric_label()), {}};
    ParametrixReport& rep = out.report;
    rep.K_radius = K_radius;
    rep.ellipticity = check_elliptic(a, m, K_radius);
    if (!rep.ellipticity.pass) {
        throw Error(ErrorKind::EllipticityFailure, "symbol is not elliptic outside |X| <= " + std::to_string(K_radius) +
                                                       " (margin " + std::to_string(rep.ellipticity.margin) + ")");
    }
    const PhaseGrid& grid = a.grid();
    const int d = a.d();
    const double h = std::max(grid.dx(), grid.dxi());
    double amax = 0.0;
    double smin = std::numeric_limits<double>::infinity();
    double slope = 0.0;
    for (int p = 0; p < grid.nx(); ++p) {
        for (int l = 0; l < grid.nxi(); ++l) {
            if (grid.point(p, l).norm() > K_radius) {
                continue;
            }
            const CMatrix A = a.at(p, l);
            amax = std::max(amax, detail::fiber_norm(A));
            Eigen::JacobiSVD<CMatrix> svd(A);
            smin = std::min(smin, svd.singularValues()(d - 1));
            if (p + 1 < grid.nx()) {
                slope = std::max(slope, detail::fiber_norm(a.at(p + 1, l) - A) / grid.dx());
            }
            if (l + 1 < grid.nxi()) {
                slope = std::max(slope, detail::fiber_norm(a.at(p, l + 1) - A) / grid.dxi());
            }
        }
    }
    rep.eps = opts.eps_factor * amax;
    if (smin > rep.eps) {
        rep.eps = 0.0;
    } else {
        rep.eps = std::max(rep.eps, 2.0 * h * slope);
    }
    const CMatrix id = CMatrix::Identity(d, d);
    const double width = std::max(0.5 * K_radius, 2.5 * h);
    rep.blend_width = width;
    for (int p = 0; p < grid.nx(); ++p) {
        for (int l = 0; l < grid.nxi(); ++l) {
            const CMatrix A = a.at(p, l);
            const double r = grid.point(p, l).norm();
            const double w = width > 0.0 ? detail::smoothstep((r - K_radius) / width) : (r > K_radius ? 1.0 : 0.0);
            CMatrix v = CMatrix::Zero(d, d);
            if (rep.eps == 0.0) {
                v = A.partialPivLu().inverse();
            } else if (w < 1.0) {
                const CMatrix Ah = A.adjoint();
                v += (1.0 - w) * CMatrix((Ah * A + rep.eps * rep.eps * id).partialPivLu().solve(Ah));
            }
            if (rep.eps > 0.0 && w > 0.0) {
                v += w * CMatrix(A.partialPivLu().inverse());
            }
            out.symbol.set(p, l, v);
        }
    }
    out.symbol.require_finite();

    const SymbolGrid residual = moyal(out.symbol, a) - SymbolGrid::constant(grid, d);
    const int shells = std::max(opts.shells, 1);
    const double dr = shells > 1 ? (opts.r_max - opts.r_min) / (shells - 1) : 0.0;
    rep.shells.resize(shells);
    for (int s = 0; s < shells; ++s) {
        rep.shells[s].R = opts.r_min + s * dr;
    }
    for (int p = 0; p < grid.nx(); ++p) {
        for (int l = 0; l < grid.nxi(); ++l) {
            if (!grid.in_interior(p, l)) {
                continue;
            }
            const Point X = grid.point(p, l);
            const double r = X.norm();
            if (r < opts.r_min - 0.5 * dr || r > opts.r_max + 0.5 * dr) {
                continue;
            }
            const int s = dr > 0.0 ? std::clamp(static_cast<int>(std::lround((r - opts.r_min) / dr)), 0, shells - 1) : 0;
            const double res = detail::fiber_norm(residual.at(p, l));
            const double lam = planck(metric, X);
            ResidualShell& sh = rep.shells[s];
            sh.residual = std::max(sh.residual, res);
            sh.weighted = std::max(sh.weighted, res * lam);
            ++sh.nodes;
        }
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& sh : rep.shells) {
        rep.sup_weighted = std::max(rep.sup_weighted, sh.weighted);
        if (sh.nodes > 0 && sh.residual > 0.0 && sh.R > 0.0) {
            lx.push_back(std::log(sh.R));
            ly.push_back(std::log(sh.residual));
        }
    }
    if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        double mx = 0.0;
        double my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / n;
            my += ly[i] / n;
        }
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        rep.decay_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
        rep.decreasing = rep.decay_exponent < 0.0;
    }
    return out;
}

} // namespace psido
