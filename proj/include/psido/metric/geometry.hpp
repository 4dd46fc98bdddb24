#pragma once

#include "psido/error.hpp"
#include "psido/metric/metric_field.hpp"
#include "psido/metric/quad_form.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace psido {

/// Planck function: sqrt of the smallest eigenvalue of g^{-1} g^sigma at x.
inline double planck(const MetricField& metric, const Point& x)
{
    const QuadForm g = metric.at(x);
    const QuadForm gs = symplectic_dual(g);
    return std::sqrt(form_ratio(gs, g).min);
}

namespace detail {

/// Ellipsoid {u : (u - c)^T A (u - c) <= r^2} expressed in coordinates where
/// the ambient form is Euclidean.
class Ellipsoid {
public:
    Ellipsoid(Eigen::VectorXd center, const RealMatrix& shape, double radius)
        : center_(std::move(center))
        , radius2_(radius * radius)
    {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (shape + shape.transpose()));
        basis_ = es.eigenvectors();
        lambda_ = es.eigenvalues();
    }

    const Eigen::VectorXd& center() const { return center_; }

    /// Euclidean projection of p onto the ellipsoid.
    Eigen::VectorXd project(const Eigen::VectorXd& p) const
    {
        const Eigen::VectorXd q = basis_.transpose() * (p - center_);
        auto value = [&](double mu) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < q.size(); ++i) {
                const double w = q(i) / (1.0 + mu * lambda_(i));
                s += lambda_(i) * w * w;
            }
            return s;
        };
        if (value(0.0) <= radius2_) {
            return p;
        }
        double lo = 0.0;
        double hi = 1.0 / lambda_.minCoeff();
        while (value(hi) > radius2_) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (value(mid) > radius2_ ? lo : hi) = mid;
        }
        Eigen::VectorXd w(q.size());
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            w(i) = q(i) / (1.0 + hi * lambda_(i));
        }
        return center_ + basis_ * w;
    }

private:
    Eigen::VectorXd center_;
    RealMatrix basis_;
    Eigen::VectorXd lambda_;
    double radius2_;
};

/// Coordinates z = L^T u where H = L L^T, so that H(u) = |z|^2.
struct Whitening {
    explicit Whitening(const QuadForm& h)
        : llt(h.matrix())
    {
    }

    Eigen::VectorXd to(const Eigen::VectorXd& u) const { return llt.matrixU() * u; }

    /// Shape of {g(u - c) <= r^2} in whitened coordinates: L^{-1} G L^{-T}.
    RealMatrix shape(const QuadForm& g) const
    {
        const RealMatrix li = llt.matrixL().solve(RealMatrix::Identity(g.dim(), g.dim()));
        return li * g.matrix() * li.transpose();
    }

    Eigen::LLT<RealMatrix> llt;
};

} // namespace detail

/// min over u in U = {g(u - c) <= r^2} of h(p - u).
inline double form_distance_to_ball(const QuadForm& h, const Point& p, const Point& c, const QuadForm& g,
                                    double r)
{
    detail::Whitening wh(h);
    detail::Ellipsoid e(wh.to(c), wh.shape(g), r);
    const Eigen::VectorXd zp = wh.to(p);
    return (zp - e.project(zp)).squaredNorm();
}

enum class DeltaMode { Exact, Fast };

struct DeltaOptions {
    DeltaMode mode = DeltaMode::Exact;
    double r_max = 1.0;
    double tol = 1e-8;
    int max_iterations = 10000;
};

struct DeltaResult {
    double value = 1.0;
    int iterations = 0;
    bool fast = false;
};

/// delta_r(X, Y) = 1 + (g^sigma_X ^ g^sigma_Y)(U_{X,r} - U_{Y,r}); the set
/// distance is found by alternating projections between the two balls in
/// coordinates where the harmonic-mean form is Euclidean.
inline DeltaResult delta_r(const MetricField& metric, const Point& x, const Point& y, double r,
                           const DeltaOptions& opts = {})
{
    if (!(r > 0.0) || r > opts.r_max) {
        throw Error(ErrorKind::Precondition, "delta_r requires 0 < r <= r_max, got r=" + std::to_string(r));
    }
    const QuadForm gx = metric.at(x);
    const QuadForm gy = metric.at(y);
    const QuadForm h = harmonic_mean(symplectic_dual(gx), symplectic_dual(gy));
    if (opts.mode == DeltaMode::Fast) {
        return {1.0 + h(x - y), 0, true};
    }
    detail::Whitening wh(h);
    const detail::Ellipsoid ex(wh.to(x), wh.shape(gx), r);
    const detail::Ellipsoid ey(wh.to(y), wh.shape(gy), r);

    Eigen::VectorXd zb = ey.project(ex.center());
    Eigen::VectorXd za = ex.project(zb);
    double dist = (za - zb).squaredNorm();
    std::vector<double> trace{dist};
    const double scale = std::max(1.0, (ex.center() - ey.center()).norm());
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const Eigen::VectorXd nb = ey.project(za);
        const Eigen::VectorXd na = ex.project(nb);
        const double next = (na - nb).squaredNorm();
        const double move = std::max((na - za).norm(), (nb - zb).norm());
        za = na;
        zb = nb;
        trace.push_back(next);
        const bool settled = std::abs(next - dist) <= opts.tol * std::max(1.0, next) && move <= opts.tol * scale;
        dist = next;
        if (settled) {
            return {1.0 + dist, it, false};
        }
    }
    if (trace.size() > 32) {
        trace.erase(trace.begin(), trace.end() - 32);
    }
    throw Error(ErrorKind::NumericFailure, "alternating projections did not converge in delta_r", trace);
}

} // namespace psido
