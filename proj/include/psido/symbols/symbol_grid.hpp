#pragma once

#include "psido/error.hpp"
#include "psido/symbols/phase_grid.hpp"
#include "psido/types.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace psido {

using MatrixSymbolFn = std::function<CMatrix(double x, double xi)>;
using ScalarSymbolFn = std::function<cplx(double x, double xi)>;

/// Samples of a d x d matrix-valued symbol on a phase grid. Stored as d*d
/// planes, plane (i, j) holding entry (i, j) at row p, column l.
class SymbolGrid {
public:
    SymbolGrid(PhaseGrid grid, int d, std::string weight_label = "", std::string metric_label = "")
        : grid_(std::move(grid))
        , d_(d)
        , weight_label_(std::move(weight_label))
        , metric_label_(std::move(metric_label))
    {
        if (d < 1) {
            throw Error(ErrorKind::DimensionMismatch, "fiber dimension must be >= 1");
        }
        planes_.assign(static_cast<std::size_t>(d) * d, CMatrix::Zero(grid_.nx(), grid_.nxi()));
    }

    static SymbolGrid sample(const MatrixSymbolFn& f, const PhaseGrid& grid, int d)
    {
        SymbolGrid out(grid, d);
        for (int p = 0; p < grid.nx(); ++p) {
            for (int l = 0; l < grid.nxi(); ++l) {
                const CMatrix v = f(grid.x(p), grid.xi(l));
                if (v.rows() != d || v.cols() != d) {
                    throw Error(ErrorKind::DimensionMismatch, "symbol evaluator returned wrong fiber size");
                }
                out.set(p, l, v);
            }
        }
        out.require_finite();
        return out;
    }

    static SymbolGrid sample(const ScalarSymbolFn& f, const PhaseGrid& grid)
    {
        SymbolGrid out(grid, 1);
        CMatrix& plane = out.planes_[0];
        for (int p = 0; p < grid.nx(); ++p) {
            for (int l = 0; l < grid.nxi(); ++l) {
                plane(p, l) = f(grid.x(p), grid.xi(l));
            }
        }
        out.require_finite();
        return out;
    }

    /// The identity symbol (times c) in fiber dimension d.
    static SymbolGrid constant(const PhaseGrid& grid, int d, cplx c = 1.0)
    {
        SymbolGrid out(grid, d);
        for (int i = 0; i < d; ++i) {
            out.plane(i, i).setConstant(c);
        }
        return out;
    }

    const PhaseGrid& grid() const { return grid_; }
    int d() const { return d_; }
    const std::string& weight_label() const { return weight_label_; }
    const std::string& metric_label() const { return metric_label_; }
    void set_labels(std::string weight, std::string metric)
    {
        weight_label_ = std::move(weight);
        metric_label_ = std::move(metric);
    }

    CMatrix& plane(int i, int j) { return planes_[static_cast<std::size_t>(i) * d_ + j]; }
    const CMatrix& plane(int i, int j) const { return planes_[static_cast<std::size_t>(i) * d_ + j]; }

    CMatrix at(int p, int l) const
    {
        CMatrix m(d_, d_);
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
                m(i, j) = plane(i, j)(p, l);
            }
        }
        return m;
    }

    void set(int p, int l, const CMatrix& m)
    {
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
                plane(i, j)(p, l) = m(i, j);
            }
        }
    }

    /// Scalar value for d = 1.
    cplx operator()(int p, int l) const { return planes_[0](p, l); }

    void require_finite() const
    {
        for (const auto& pl : planes_) {
            if (!pl.allFinite()) {
                throw Error(ErrorKind::NonFinite, "symbol has a non-finite value at some node");
            }
        }
    }

    SymbolGrid& operator+=(const SymbolGrid& o)
    {
        require_compatible(o);
        for (std::size_t k = 0; k < planes_.size(); ++k) {
            planes_[k] += o.planes_[k];
        }
        return *this;
    }

    SymbolGrid& operator-=(const SymbolGrid& o)
    {
        require_compatible(o);
        for (std::size_t k = 0; k < planes_.size(); ++k) {
            planes_[k] -= o.planes_[k];
        }
        return *this;
    }

    SymbolGrid& operator*=(cplx c)
    {
        for (auto& pl : planes_) {
            pl *= c;
        }
        return *this;
    }

    friend SymbolGrid operator+(SymbolGrid a, const SymbolGrid& b) { return a += b; }
    friend SymbolGrid operator-(SymbolGrid a, const SymbolGrid& b) { return a -= b; }
    friend SymbolGrid operator*(SymbolGrid a, cplx c) { return a *= c; }
    friend SymbolGrid operator*(cplx c, SymbolGrid a) { return a *= c; }

    /// Pointwise (fiberwise matrix) product, not the # product.
    SymbolGrid pointwise(const SymbolGrid& o) const
    {
        require_compatible(o);
        SymbolGrid out(grid_, d_);
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
                for (int k = 0; k < d_; ++k) {
                    out.plane(i, j).array() += plane(i, k).array() * o.plane(k, j).array();
                }
            }
        }
        return out;
    }

    /// Pointwise conjugate transpose.
    SymbolGrid adjoint() const
    {
        SymbolGrid out(grid_, d_, weight_label_, metric_label_);
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
                out.plane(i, j) = plane(j, i).conjugate();
            }
        }
        return out;
    }

    /// Multiplies every fiber by the real scalar field f(x, xi).
    SymbolGrid scaled(const std::function<double(double, double)>& f) const
    {
        RealMatrix w(grid_.nx(), grid_.nxi());
        for (int p = 0; p < grid_.nx(); ++p) {
            for (int l = 0; l < grid_.nxi(); ++l) {
                w(p, l) = f(grid_.x(p), grid_.xi(l));
            }
        }
        SymbolGrid out = *this;
        for (auto& pl : out.planes_) {
            pl.array() *= w.array();
        }
        return out;
    }

    /// max over nodes (optionally restricted by `keep`) of the fiber
    /// entrywise maximum modulus.
    double max_abs(const std::function<bool(int, int)>& keep = {}) const
    {
        double m = 0.0;
        for (const auto& pl : planes_) {
            for (int p = 0; p < grid_.nx(); ++p) {
                for (int l = 0; l < grid_.nxi(); ++l) {
                    if (!keep || keep(p, l)) {
                        m = std::max(m, std::abs(pl(p, l)));
                    }
                }
            }
        }
        return m;
    }

    double max_abs_core() const
    {
        return max_abs([this](int p, int l) { return grid_.in_core(p, l); });
    }

    void require_compatible(const SymbolGrid& o) const
    {
        require_same_grid(grid_, o.grid_);
        if (d_ != o.d_) {
            throw Error(ErrorKind::DimensionMismatch, "symbols have different fiber dimensions");
        }
    }

private:
    PhaseGrid grid_;
    int d_;
    std::string weight_label_;
    std::string metric_label_;
    std::vector<CMatrix> planes_;
};

/// sup-norm of a - b on the core box.
inline double core_distance(const SymbolGrid& a, const SymbolGrid& b) { return (a - b).max_abs_core(); }

} // namespace psido
