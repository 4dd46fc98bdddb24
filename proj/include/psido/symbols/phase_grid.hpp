#pragma once

#include "psido/error.hpp"
#include "psido/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psido {

/// Uniform rectangular sampling of the phase plane (n = 1).
/// Nodes are x_p = -L_x + p*dx, xi_l = -L_xi + l*dxi, p < N_x, l < N_xi.
class PhaseGrid {
public:
    PhaseGrid(double lx, double lxi, int nx, int nxi)
        : lx_(lx)
        , lxi_(lxi)
        , nx_(nx)
        , nxi_(nxi)
    {
        if (!(lx > 0.0) || !(lxi > 0.0) || !std::isfinite(lx) || !std::isfinite(lxi)) {
            throw Error(ErrorKind::IncompatibleGrid, "grid extents must be positive and finite");
        }
        if (!is_power_of_two(nx) || !is_power_of_two(nxi) || nx < 2 || nxi < 2) {
            throw Error(ErrorKind::IncompatibleGrid, "grid sizes must be powers of two >= 2");
        }
    }

    /// Fourier-conjugate grid: N_xi = N_x and dxi = 2*pi/(N_x*dx), so L_xi
    /// follows from L_x and N_x.
    static PhaseGrid fourier(double lx, int nx)
    {
        const double dx = 2.0 * lx / nx;
        const double dxi = 2.0 * pi / (nx * dx);
        return PhaseGrid(lx, 0.5 * nx * dxi, nx, nx);
    }

    double lx() const { return lx_; }
    double lxi() const { return lxi_; }
    int nx() const { return nx_; }
    int nxi() const { return nxi_; }
    int size() const { return nx_ * nxi_; }
    double dx() const { return 2.0 * lx_ / nx_; }
    double dxi() const { return 2.0 * lxi_ / nxi_; }
    double cell() const { return dx() * dxi(); }

    double x(int p) const { return -lx_ + p * dx(); }
    double xi(int l) const { return -lxi_ + l * dxi(); }
    Point point(int p, int l) const { return point2(x(p), xi(l)); }
    /// Flat node index, x-major: values for fixed p are contiguous in l.
    int index(int p, int l) const { return p * nxi_ + l; }

    bool fourier_compatible() const
    {
        const double want = 2.0 * pi / (nx_ * dx());
        return nx_ == nxi_ && std::abs(dxi() - want) <= 1e-12 * want;
    }

    void require_fourier() const
    {
        if (!fourier_compatible()) {
            throw Error(ErrorKind::IncompatibleGrid, "grid is not Fourier-compatible (need N_xi = N_x and dxi = 2pi/(N_x dx))");
        }
    }

    /// Central half-box |x| <= L_x/2, |xi| <= L_xi/2, used for residual comparisons.
    bool in_core(double x, double xi) const { return std::abs(x) <= 0.5 * lx_ && std::abs(xi) <= 0.5 * lxi_; }
    bool in_core(int p, int l) const { return in_core(x(p), xi(l)); }

    /// Box minus a 10% boundary margin on each side.
    bool in_interior(double x, double xi) const
    {
        return std::abs(x) <= 0.8 * lx_ && std::abs(xi) <= 0.8 * lxi_;
    }
    bool in_interior(int p, int l) const { return in_interior(x(p), xi(l)); }

    bool contains(double x, double xi) const
    {
        const double tx = 1e-12 * lx_;
        const double txi = 1e-12 * lxi_;
        return x >= -lx_ - tx && x <= lx_ + tx && xi >= -lxi_ - txi && xi <= lxi_ + txi;
    }

    /// Nearest node, clamped to the index range; throws outside the box.
    std::pair<int, int> nearest(const Point& X) const
    {
        if (X.size() != 2) {
            throw Error(ErrorKind::DimensionMismatch, "phase grid points are 2-dimensional");
        }
        if (!contains(X(0), X(1))) {
            throw Error(ErrorKind::OutsideBox, "point outside the grid box");
        }
        const int p = std::clamp(static_cast<int>(std::lround((X(0) + lx_) / dx())), 0, nx_ - 1);
        const int l = std::clamp(static_cast<int>(std::lround((X(1) + lxi_) / dxi())), 0, nxi_ - 1);
        return {p, l};
    }

    bool operator==(const PhaseGrid& o) const
    {
        return nx_ == o.nx_ && nxi_ == o.nxi_ && std::abs(lx_ - o.lx_) <= 1e-12 * lx_ &&
               std::abs(lxi_ - o.lxi_) <= 1e-12 * lxi_;
    }

private:
    double lx_;
    double lxi_;
    int nx_;
    int nxi_;
};

inline void require_same_grid(const PhaseGrid& a, const PhaseGrid& b)
{
    if (!(a == b)) {
        throw Error(ErrorKind::IncompatibleGrid, "symbols live on different grids");
    }
}

} // namespace psido
