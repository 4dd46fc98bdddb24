#pragma once

#include "psido/metric/metric_field.hpp"
#include "psido/symbols/seminorm.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace psido {

struct EllipticityReport {
    double K_radius = 0.0;
    double C = 0.0;              // best constant in |det a| >= C M^d, i.e. the margin
    double margin = 0.0;         // min over exterior nodes of |det a(X)| / M(X)^d
    double inverse_bound = 0.0;  // max over exterior nodes of ||a(X)^{-1}|| M(X)
    double c0_prime = 0.0;       // max of ||A^{-1}|| |det A| / ||A||^{d-1}
    std::vector<Point> locus;    // nodes attaining the margin (capped)
    int nodes = 0;
    bool pass = false;
};

/// Ellipticity outside the Euclidean ball |X| <= K_radius, scanned over all
/// grid nodes.
inline EllipticityReport check_elliptic(const SymbolGrid& a, const Weight& m, double K_radius)
{
    const PhaseGrid& grid = a.grid();
    if (!(K_radius >= 0.0) || K_radius >= std::min(grid.lx(), grid.lxi())) {
        throw Error(ErrorKind::Precondition, "K radius must lie strictly inside the grid box");
    }
    EllipticityReport rep;
    rep.K_radius = K_radius;
    rep.margin = std::numeric_limits<double>::infinity();
    const int d = a.d();
    std::vector<std::pair<double, Point>> ratios;
    for (int p = 0; p < grid.nx(); ++p) {
        for (int l = 0; l < grid.nxi(); ++l) {
            const Point X = grid.point(p, l);
            if (X.norm() <= K_radius) {
                continue;
            }
            ++rep.nodes;
            const CMatrix A = a.at(p, l);
            const double mx = m(X);
            const double det = std::abs(A.partialPivLu().determinant());
            const double ratio = det / std::pow(mx, d);
            ratios.emplace_back(ratio, X);
            rep.margin = std::min(rep.margin, ratio);
            if (det == 0.0 || !std::isfinite(det)) {
                rep.inverse_bound = std::numeric_limits<double>::infinity();
                continue;
            }
            const double norm_a = detail::fiber_norm(A);
            const double norm_inv = detail::fiber_norm(A.inverse());
            rep.inverse_bound = std::max(rep.inverse_bound, norm_inv * mx);
            rep.c0_prime = std::max(rep.c0_prime, norm_inv * det / std::pow(norm_a, d - 1));
        }
    }
    if (rep.nodes == 0) {
        rep.margin = 0.0;
    }
    rep.C = rep.margin;
    const double cut = std::max(rep.margin * (1.0 + 1e-9), 1e-300);
    for (const auto& [ratio, X] : ratios) {
        if (ratio <= cut && rep.locus.size() < 64) {
            rep.locus.push_back(X);
        }
    }
    rep.pass = rep.nodes > 0 && rep.margin > 0.0 && std::isfinite(rep.margin) && std::isfinite(rep.inverse_bound);
    return rep;
}

} // namespace psido
