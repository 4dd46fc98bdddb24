#pragma once

#include "psido/metric/metric_field.hpp"
#include "psido/symbols/seminorm.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace psido {

struct PartitionOptions {
    /// Cells are split until each side is at most spacing * r times the
    /// g-ball half-extent along that axis at the cell center.
    double spacing = 1.0;
    /// Padding of the lattice box beyond the grid box, as a fraction of it.
    double pad_fraction = 0.1;
    std::size_t max_centers = 20000;
};

/// Gaussian bumps exp(-g_Y(X - Y) / (2 r^2)) on a lattice of centers Y,
/// renormalized pointwise so that sum_Y theta_Y(X) |g_Y|^{1/2} cellvol = 1
/// on the grid. Members are evaluated on demand.
class ConfinedFamily {
public:
    ConfinedFamily(const PhaseGrid& grid, const MetricField& metric, double r, std::vector<Point> centers,
                   std::vector<double> cell_volumes)
        : grid_(grid)
        , metric_(metric)
        , r_(r)
        , centers_(std::move(centers))
        , cell_volumes_(std::move(cell_volumes))
    {
        if (!(r > 0.0)) {
            throw Error(ErrorKind::Precondition, "partition radius must be positive");
        }
        if (centers_.empty()) {
            throw Error(ErrorKind::Coverage, "partition has no centers");
        }
        if (cell_volumes_.size() != centers_.size()) {
            throw Error(ErrorKind::DimensionMismatch, "one cell volume per center required");
        }
        for (double v : cell_volumes_) {
            if (!(v > 0.0)) {
                throw Error(ErrorKind::Precondition, "cell volumes must be positive");
            }
        }
        forms_.reserve(centers_.size());
        for (const auto& y : centers_) {
            forms_.push_back(metric.at(y));
            root_det_.push_back(std::sqrt(forms_.back().det()));
        }
        normalize();
    }

    /// Centers sharing one cell volume.
    ConfinedFamily(const PhaseGrid& grid, const MetricField& metric, double r, std::vector<Point> centers,
                   double cell_volume)
        : ConfinedFamily(grid, metric, r, centers, std::vector<double>(centers.size(), cell_volume))
    {
    }

    const PhaseGrid& grid() const { return grid_; }
    const MetricField& metric() const { return metric_; }
    double r() const { return r_; }
    double cell_volume(std::size_t i) const { return cell_volumes_[i]; }
    std::size_t size() const { return centers_.size(); }
    const Point& center(std::size_t i) const { return centers_[i]; }
    const QuadForm& form(std::size_t i) const { return forms_[i]; }
    /// |g_Y|^{1/2} * cellvol: the quadrature weight of member i.
    double measure(std::size_t i) const { return root_det_[i] * cell_volumes_[i]; }

    /// theta_Y on the grid (zero where the bump is below 1e-300 relative).
    SymbolGrid member(std::size_t i) const
    {
        SymbolGrid out(grid_, 1, "one", metric_.label());
        CMatrix& plane = out.plane(0, 0);
        for_each_near(i, [&](int p, int l, double bump) {
            const double s = normalizer_(p, l);
            plane(p, l) = s > 0.0 ? bump / s : 0.0;
        });
        return out;
    }

    /// max over core nodes of |sum_Y theta_Y |g_Y|^{1/2} cellvol - 1|.
    double sum_residual() const
    {
        RealMatrix total = RealMatrix::Zero(grid_.nx(), grid_.nxi());
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            const double w = measure(i);
            for_each_near(i, [&](int p, int l, double bump) {
                if (normalizer_(p, l) > 0.0) {
                    total(p, l) += w * bump / normalizer_(p, l);
                }
            });
        }
        double worst = 0.0;
        for (int p = 0; p < grid_.nx(); ++p) {
            for (int l = 0; l < grid_.nxi(); ++l) {
                if (grid_.in_core(p, l)) {
                    worst = std::max(worst, std::abs(total(p, l) - 1.0));
                }
            }
        }
        return worst;
    }

    /// Common confinement constant: max over members (every `stride`-th) of
    /// confinement_norm at order k.
    double confinement_constant(int k, std::size_t stride = 1, const SeminormOptions& opts = {}) const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < centers_.size(); i += std::max<std::size_t>(stride, 1)) {
            worst = std::max(worst, confinement_norm(member(i), centers_[i], r_, metric_, k, opts));
        }
        return worst;
    }

    /// Calls f(p, l, bump) for nodes within g_Y-distance 8r of center i.
    template <class F>
    void for_each_near(std::size_t i, F&& f) const
    {
        const QuadForm& g = forms_[i];
        const RealMatrix ginv = g.inverse_matrix();
        const double reach = 8.0 * r_;
        const Point& y = centers_[i];
        const double ex = reach * std::sqrt(ginv(0, 0));
        const double exi = reach * std::sqrt(ginv(1, 1));
        const int p0 = std::max(0, static_cast<int>(std::floor((y(0) - ex + grid_.lx()) / grid_.dx())));
        const int p1 = std::min(grid_.nx() - 1, static_cast<int>(std::ceil((y(0) + ex + grid_.lx()) / grid_.dx())));
        const int l0 = std::max(0, static_cast<int>(std::floor((y(1) - exi + grid_.lxi()) / grid_.dxi())));
        const int l1 = std::min(grid_.nxi() - 1, static_cast<int>(std::ceil((y(1) + exi + grid_.lxi()) / grid_.dxi())));
        const RealMatrix& gm = g.matrix();
        const double inv2r2 = 0.5 / (r_ * r_);
        for (int p = p0; p <= p1; ++p) {
            const double dx = grid_.x(p) - y(0);
            for (int l = l0; l <= l1; ++l) {
                const double dxi = grid_.xi(l) - y(1);
                const double q = gm(0, 0) * dx * dx + 2.0 * gm(0, 1) * dx * dxi + gm(1, 1) * dxi * dxi;
                if (q <= 64.0 * r_ * r_) {
                    f(p, l, std::exp(-q * inv2r2));
                }
            }
        }
    }

private:
    void normalize()
    {
        normalizer_ = RealMatrix::Zero(grid_.nx(), grid_.nxi());
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            const double w = measure(i);
            for_each_near(i, [&](int p, int l, double bump) { normalizer_(p, l) += w * bump; });
        }
        for (int p = 0; p < grid_.nx(); ++p) {
            for (int l = 0; l < grid_.nxi(); ++l) {
                if (normalizer_(p, l) < 1e-12) {
                    if (grid_.in_core(p, l)) {
                        throw Error(ErrorKind::Coverage,
                                    "partition centers too sparse: normalizer below 1e-12 in the core box");
                    }
                    normalizer_(p, l) = 0.0;
                }
            }
        }
    }

    PhaseGrid grid_;
    MetricField metric_;
    double r_;
    std::vector<Point> centers_;
    std::vector<double> cell_volumes_;
    std::vector<QuadForm> forms_;
    std::vector<double> root_det_;
    RealMatrix normalizer_;
};

namespace detail {

struct LatticeCell {
    double x;
    double xi;
    double wx;
    double wxi;
};

} // namespace detail

/// Metric-adapted centers: the padded grid box is split (kd-style, one
/// axis at a time) until every cell side is at most spacing * r times the
/// unit g-ball half-extent along that axis at the cell center. Centers are
/// cell midpoints, weighted by cell area.
inline ConfinedFamily partition_of_unity(const PhaseGrid& grid, const MetricField& metric, double r,
                                         const PartitionOptions& opts = {})
{
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(ErrorKind::Precondition, "partition radius must be positive");
    }
    const double hx = grid.lx() * (1.0 + opts.pad_fraction);
    const double hxi = grid.lxi() * (1.0 + opts.pad_fraction);
    std::vector<detail::LatticeCell> stack{{0.0, 0.0, 2.0 * hx, 2.0 * hxi}};
    std::vector<Point> centers;
    std::vector<double> volumes;
    while (!stack.empty()) {
        const detail::LatticeCell c = stack.back();
        stack.pop_back();
        const RealMatrix ginv = metric.at(point2(c.x, c.xi)).inverse_matrix();
        const double sx = opts.spacing * r * std::sqrt(ginv(0, 0));
        const double sxi = opts.spacing * r * std::sqrt(ginv(1, 1));
        const double over_x = c.wx / sx;
        const double over_xi = c.wxi / sxi;
        if (over_x > 1.0 && over_x >= over_xi) {
            stack.push_back({c.x - 0.25 * c.wx, c.xi, 0.5 * c.wx, c.wxi});
            stack.push_back({c.x + 0.25 * c.wx, c.xi, 0.5 * c.wx, c.wxi});
        } else if (over_xi > 1.0) {
            stack.push_back({c.x, c.xi - 0.25 * c.wxi, c.wx, 0.5 * c.wxi});
            stack.push_back({c.x, c.xi + 0.25 * c.wxi, c.wx, 0.5 * c.wxi});
        } else {
            centers.push_back(point2(c.x, c.xi));
            volumes.push_back(c.wx * c.wxi);
        }
        if (centers.size() + stack.size() > opts.max_centers) {
            throw Error(ErrorKind::Precondition, "partition needs more than " + std::to_string(opts.max_centers) +
                                                     " centers; increase r or the spacing");
        }
    }
    return ConfinedFamily(grid, metric, r, std::move(centers), std::move(volumes));
}

} // namespace psido
