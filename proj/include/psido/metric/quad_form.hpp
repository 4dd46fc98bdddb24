#pragma once

#include "psido/error.hpp"
#include "psido/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace psido {

/// Positive-definite quadratic form on a 2n-dimensional phase space,
/// basis ordered (x_1..x_n, xi_1..xi_n).
class QuadForm {
public:
    explicit QuadForm(RealMatrix m)
    {
        if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
            throw Error(ErrorKind::DimensionMismatch,
                        "quadratic form must be square with even dimension, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        }
        if (!m.allFinite()) {
            throw Error(ErrorKind::NonFinite, "quadratic form has non-finite entries");
        }
        const double scale = m.norm();
        if ((m - m.transpose()).norm() > 1e-12 * scale) {
            throw Error(ErrorKind::DegenerateForm, "quadratic form is not symmetric");
        }
        m_ = 0.5 * (m + m.transpose());
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(m_, Eigen::EigenvaluesOnly);
        min_eig_ = es.eigenvalues()(0);
        max_eig_ = es.eigenvalues()(m_.rows() - 1);
        if (!(min_eig_ > 0.0)) {
            throw Error(ErrorKind::DegenerateForm, "quadratic form is not positive definite");
        }
    }

    static QuadForm identity(int dim) { return QuadForm(RealMatrix::Identity(dim, dim)); }

    static QuadForm scalar(int dim, double s) { return QuadForm(s * RealMatrix::Identity(dim, dim)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    int n() const { return dim() / 2; }
    const RealMatrix& matrix() const { return m_; }
    double min_eigenvalue() const { return min_eig_; }
    double max_eigenvalue() const { return max_eig_; }
    double condition() const { return max_eig_ / min_eig_; }

    double operator()(const Eigen::VectorXd& t) const { return t.dot(m_ * t); }

    double det() const { return m_.determinant(); }

    RealMatrix inverse_matrix() const
    {
        if (condition() > 1e14) {
            throw Error(ErrorKind::DegenerateForm, "condition number exceeds 1e14");
        }
        return m_.llt().solve(RealMatrix::Identity(dim(), dim()));
    }

    /// Symmetric square root and its inverse.
    RealMatrix sqrt_matrix() const
    {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(m_);
        return es.operatorSqrt();
    }
    RealMatrix inv_sqrt_matrix() const
    {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(m_);
        return es.operatorInverseSqrt();
    }

private:
    RealMatrix m_;
    double min_eig_ = 0.0;
    double max_eig_ = 0.0;
};

/// Standard symplectic matrix J = [[0, I], [-I, 0]].
inline RealMatrix symplectic_matrix(int n)
{
    RealMatrix j = RealMatrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = RealMatrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = -RealMatrix::Identity(n, n);
    return j;
}

/// Symplectic dual: J^T q^{-1} J.
inline QuadForm symplectic_dual(const QuadForm& q)
{
    const RealMatrix j = symplectic_matrix(q.n());
    return QuadForm(j.transpose() * q.inverse_matrix() * j);
}

inline void require_same_dim(const QuadForm& a, const QuadForm& b)
{
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "forms of dimension " + std::to_string(a.dim()) +
                                                      " and " + std::to_string(b.dim()));
    }
}

/// Riccati geometric mean: the positive G with G q1^{-1} G = q2.
inline QuadForm geometric_mean(const QuadForm& q1, const QuadForm& q2)
{
    require_same_dim(q1, q2);
    if (q1.condition() > 1e14 || q2.condition() > 1e14) {
        throw Error(ErrorKind::DegenerateForm, "condition number exceeds 1e14");
    }
    const RealMatrix s = q1.sqrt_matrix();
    const RealMatrix si = q1.inv_sqrt_matrix();
    RealMatrix inner = si * q2.matrix() * si;
    inner = 0.5 * (inner + inner.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(inner);
    RealMatrix g = s * es.operatorSqrt() * s;
    return QuadForm(0.5 * (g + g.transpose()));
}

/// Harmonic mean normalized so that the mean of equal forms is the form:
/// 2 (q1^{-1} + q2^{-1})^{-1}.
inline QuadForm harmonic_mean(const QuadForm& q1, const QuadForm& q2)
{
    require_same_dim(q1, q2);
    const RealMatrix sum = q1.inverse_matrix() + q2.inverse_matrix();
    RealMatrix h = 2.0 * sum.llt().solve(RealMatrix::Identity(q1.dim(), q1.dim()));
    return QuadForm(0.5 * (h + h.transpose()));
}

/// Extreme values of q1(T)/q2(T) over T != 0 (generalized eigenvalues).
struct FormRatio {
    double min = 0.0;
    double max = 0.0;
};

inline FormRatio form_ratio(const QuadForm& q1, const QuadForm& q2)
{
    require_same_dim(q1, q2);
    Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> es(q1.matrix(), q2.matrix(),
                                                            Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

/// q1 <= q2 as forms, with relative slack.
inline bool form_leq(const QuadForm& q1, const QuadForm& q2, double slack = 1e-9)
{
    return form_ratio(q1, q2).max <= 1.0 + slack;
}

} // namespace psido
