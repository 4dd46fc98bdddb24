#pragma once

#include "psido/linalg.hpp"
#include "psido/quantize/operator_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <string>

namespace psido {

struct RieszOptions {
    int initial_nodes = 16;
    int max_nodes = 4096;
    double stabilization = 1e-8;   // change under node doubling
    double contour_clearance = 1e-6;   // min |sigma^2 - radius| / radius
};

struct RieszProjector {
    CMatrix B;
    double radius = 0.0;
    int nodes = 0;
    double idempotence = 0.0;      // ||B^2 - B||
    double self_adjointness = 0.0; // ||B - B*||
    int rank = 0;
    double last_change = 0.0;      // ||B_{2n} - B_n|| at acceptance
    double kernel_angle = 0.0;     // sin of the principal angle between range(B) and the SVD kernel
};

namespace detail {

/// Trapezoid nodes k = offset, offset + stride, ... of n on the circle; uses
/// the conjugate symmetry of the Hermitian resolvent, so only the upper
/// half-plane is solved.
inline CMatrix riesz_partial(const CMatrix& h, double radius, int n, int offset, int stride)
{
    const Eigen::Index m = h.rows();
    const CMatrix id = CMatrix::Identity(m, m);
    CMatrix sum = CMatrix::Zero(m, m);
    for (int k = offset; k < n; k += stride) {
        const double theta = 2.0 * pi * k / n;
        const cplx lambda = radius * std::exp(I * theta);
        if (theta > pi + 1e-12) {
            continue;   // mirrored below
        }
        const CMatrix res = (lambda * id - h).partialPivLu().solve(id);
        const CMatrix term = lambda * res;
        const bool real_axis = std::abs(std::sin(theta)) < 1e-12;
        if (real_axis) {
            sum += term;
        } else {
            sum += term + CMatrix(term.adjoint());
        }
    }
    return sum;
}

} // namespace detail

/// B = (1/2 pi i) \oint_{|lambda| = radius} (lambda - A*A)^{-1} d lambda by the
/// trapezoid rule, doubling nodes until B moves by at most `stabilization`.
inline RieszProjector riesz_projector(const OperatorMatrix& a, double radius, const RieszOptions& opts = {})
{
    if (!(radius > 0.0) || radius > 1.0) {
        throw Error(ErrorKind::Precondition, "Riesz contour radius must lie in (0, 1]");
    }
    const CMatrix h = a.matrix().adjoint() * a.matrix();
    Eigen::BDCSVD<CMatrix> svd(a.matrix(), Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    double clearance = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        clearance = std::min(clearance, std::abs(sv(i) * sv(i) - radius) / radius);
    }
    if (clearance <= opts.contour_clearance) {
        throw Error(ErrorKind::EigenvalueOnContour, "an eigenvalue of A*A lies on the contour |lambda| = " +
                                                        std::to_string(radius));
    }
    RieszProjector out;
    out.radius = radius;
    int n = opts.initial_nodes;
    CMatrix sum = detail::riesz_partial(h, radius, n, 0, 1);
    CMatrix b = sum / static_cast<double>(n);
    while (true) {
        if (2 * n > opts.max_nodes) {
            throw Error(ErrorKind::QuadratureNonConvergence, "Riesz quadrature did not stabilize within " +
                                                                 std::to_string(opts.max_nodes) + " nodes");
        }
        // the doubled rule reuses every old node and adds the odd ones
        sum += detail::riesz_partial(h, radius, 2 * n, 1, 2);
        n *= 2;
        const CMatrix next = sum / static_cast<double>(n);
        out.last_change = linalg::operator_norm(next - b);
        b = next;
        if (out.last_change <= opts.stabilization) {
            break;
        }
    }
    out.B = std::move(b);
    out.nodes = n;
    out.idempotence = linalg::operator_norm(out.B * out.B - out.B);
    out.self_adjointness = linalg::operator_norm(out.B - CMatrix(out.B.adjoint()));
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (out.B + CMatrix(out.B.adjoint())));
    std::vector<Eigen::Index> range;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        if (eig.eigenvalues()(i) > 0.5) {
            range.push_back(i);
        }
    }
    out.rank = static_cast<int>(range.size());
    CMatrix range_basis(h.rows(), out.rank);
    for (int i = 0; i < out.rank; ++i) {
        range_basis.col(i) = eig.eigenvectors().col(range[i]);
    }
    std::vector<Eigen::Index> ker;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) * sv(i) < radius) {
            ker.push_back(i);
        }
    }
    CMatrix ker_basis(h.rows(), static_cast<Eigen::Index>(ker.size()));
    for (std::size_t i = 0; i < ker.size(); ++i) {
        ker_basis.col(static_cast<Eigen::Index>(i)) = svd.matrixV().col(ker[i]);
    }
    out.kernel_angle = linalg::principal_angle_sin(range_basis, ker_basis);
    return out;
}

} // namespace psido
