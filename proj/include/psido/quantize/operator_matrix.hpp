#pragma once

#include "psido/error.hpp"
#include "psido/linalg.hpp"
#include "psido/symbols/phase_grid.hpp"
#include "psido/types.hpp"

#include <utility>

namespace psido {

/// Dense matrix of a discretized Weyl operator. Row/column index j*d + a
/// addresses spatial node j, fiber component a; the dx quadrature factor is
/// included, so the matrix acts directly on nodal values.
class OperatorMatrix {
public:
    OperatorMatrix(PhaseGrid grid, int d, CMatrix matrix)
        : grid_(std::move(grid))
        , d_(d)
        , matrix_(std::move(matrix))
    {
        const Eigen::Index n = static_cast<Eigen::Index>(d_) * grid_.nx();
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw Error(ErrorKind::DimensionMismatch, "operator matrix size does not match grid and fiber");
        }
    }

    static OperatorMatrix identity(const PhaseGrid& grid, int d = 1)
    {
        const Eigen::Index n = static_cast<Eigen::Index>(d) * grid.nx();
        return {grid, d, CMatrix::Identity(n, n)};
    }

    const PhaseGrid& grid() const { return grid_; }
    int d() const { return d_; }
    const CMatrix& matrix() const { return matrix_; }
    CMatrix& matrix() { return matrix_; }
    Eigen::Index size() const { return matrix_.rows(); }

    bool windowed = false;          // symbol was tapered before transforming
    bool aliasing_warning = false;  // symbol mass near the xi-boundary

    OperatorMatrix adjoint() const { return like(matrix_.adjoint()); }

    OperatorMatrix like(CMatrix m) const
    {
        OperatorMatrix out(grid_, d_, std::move(m));
        out.windowed = windowed;
        out.aliasing_warning = aliasing_warning;
        return out;
    }

    double norm() const { return linalg::operator_norm(matrix_); }

    double hermitian_residual() const { return linalg::max_abs(matrix_ - matrix_.adjoint()); }

    void require_compatible(const OperatorMatrix& o) const
    {
        require_same_grid(grid_, o.grid_);
        if (d_ != o.d_) {
            throw Error(ErrorKind::DimensionMismatch, "operators have different fiber dimensions");
        }
    }

    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b)
    {
        a.require_compatible(b);
        OperatorMatrix out = a.like(a.matrix_ * b.matrix_);
        out.windowed = a.windowed || b.windowed;
        out.aliasing_warning = a.aliasing_warning || b.aliasing_warning;
        return out;
    }

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b)
    {
        a.require_compatible(b);
        OperatorMatrix out = a.like(a.matrix_ + b.matrix_);
        out.windowed = a.windowed || b.windowed;
        return out;
    }

    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b)
    {
        a.require_compatible(b);
        OperatorMatrix out = a.like(a.matrix_ - b.matrix_);
        out.windowed = a.windowed || b.windowed;
        return out;
    }

    friend OperatorMatrix operator*(cplx c, const OperatorMatrix& a) { return a.like(c * a.matrix_); }

private:
    PhaseGrid grid_;
    int d_;
    CMatrix matrix_;
};

} // namespace psido
