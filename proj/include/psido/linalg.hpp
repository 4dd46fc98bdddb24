#pragma once

#include "psido/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace psido::linalg {

inline constexpr Eigen::Index full_svd_limit = 1024;

inline Eigen::VectorXd singular_values(const CMatrix& a)
{
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues();
}

/// Largest singular value of an implicit operator by power iteration on
/// A*A, from a fixed pseudo-random start.
template <class Apply, class ApplyAdjoint>
double power_norm(Apply&& apply, ApplyAdjoint&& apply_adjoint, Eigen::Index n, double tol = 1e-12,
                  int max_iterations = 3000)
{
    if (n == 0) {
        return 0.0;
    }
    CVector v(n);
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    for (Eigen::Index i = 0; i < n; ++i) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        const double re = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        const double im = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
        v(i) = cplx(re, im);
    }
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        CVector w = apply_adjoint(apply(v));
        const double nrm = w.norm();
        if (nrm == 0.0) {
            return 0.0;
        }
        v = w / nrm;
        const double next = std::sqrt(nrm);
        if (std::abs(next - estimate) <= tol * next) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

/// Largest singular value. Full SVD up to `full_svd_limit`, power iteration
/// on A*A beyond.
inline double operator_norm(const CMatrix& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    if (std::max(a.rows(), a.cols()) <= full_svd_limit) {
        return singular_values(a)(0);
    }
    return power_norm([&](const CVector& v) { return CVector(a * v); },
                      [&](const CVector& v) { return CVector(a.adjoint() * v); }, a.cols());
}

/// ||A B|| without forming the product.
inline double product_norm(const CMatrix& a, const CMatrix& b, double tol = 1e-12)
{
    return power_norm([&](const CVector& v) { return CVector(a * (b * v)); },
                      [&](const CVector& v) { return CVector(b.adjoint() * (a.adjoint() * v)); }, b.cols(), tol);
}

inline double max_abs(const CMatrix& a)
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// sin of the largest principal angle between span(a) and span(b); both
/// arguments must have orthonormal columns.
inline double principal_angle_sin(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() != b.cols()) {
        return 1.0;
    }
    if (a.cols() == 0) {
        return 0.0;
    }
    const CMatrix residual = b - a * (a.adjoint() * b);
    return std::min(1.0, operator_norm(residual));
}

/// Orthonormal basis of the columns of `a` (thin QR).
inline CMatrix orthonormalize(const CMatrix& a)
{
    Eigen::HouseholderQR<CMatrix> qr(a);
    return qr.householderQ() * CMatrix::Identity(a.rows(), a.cols());
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

} // namespace psido::linalg
