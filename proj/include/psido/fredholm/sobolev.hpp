#pragma once

#include "psido/metric/metric_field.hpp"
#include "psido/quantize/weyl.hpp"
#include "psido/symbols/partition.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace psido {

struct SobolevReport {
    double value = 0.0;
    std::string family;            // metric label and radius of the localizing family
    std::string weight;
    double l2 = 0.0;               // plain L^2 norm on the grid
    double ratio = 0.0;            // value / l2 (0 when u = 0)
};

/// H(M,g) norm with the partition family as localizers:
///   ||u||^2 = sum_Y M(Y)^2 ||theta_Y^w u||^2 |g_Y|^{1/2} cellvol.
/// The sum is folded into one Gram matrix so that many functions cost one
/// quadratic form each.
class SobolevNorm {
public:
    SobolevNorm(const Weight& m, const ConfinedFamily& family)
        : grid_(family.grid())
        , weight_(m.label())
        , family_(family.metric().label() + ", r = " + std::to_string(family.r()))
    {
        grid_.require_fourier();
        const int n = grid_.nx();
        gram_ = CMatrix::Zero(n, n);
        for (std::size_t i = 0; i < family.size(); ++i) {
            const double w = std::pow(m(family.center(i)), 2) * family.measure(i);
            if (w == 0.0) {
                continue;
            }
            const CMatrix q = weyl_quantize(family.member(i)).matrix();
            gram_.noalias() += w * (q.adjoint() * q);
        }
        gram_ = 0.5 * (gram_ + CMatrix(gram_.adjoint()));
    }

    const PhaseGrid& grid() const { return grid_; }
    const CMatrix& gram() const { return gram_; }

    SobolevReport operator()(const CVector& u) const
    {
        if (u.size() != grid_.nx()) {
            throw Error(ErrorKind::DimensionMismatch, "function length " + std::to_string(u.size()) +
                                                          " does not match the family grid N_x = " +
                                                          std::to_string(grid_.nx()));
        }
        if (!u.allFinite()) {
            throw Error(ErrorKind::NonFinite, "function has non-finite samples");
        }
        SobolevReport rep;
        rep.family = family_;
        rep.weight = weight_;
        const double q = std::max(0.0, (u.adjoint() * gram_ * u)(0).real());
        rep.value = std::sqrt(q * grid_.dx());
        rep.l2 = std::sqrt(u.squaredNorm() * grid_.dx());
        rep.ratio = rep.l2 > 0.0 ? rep.value / rep.l2 : 0.0;
        return rep;
    }

    /// Best constant C with ||u||_H / ||u||_{L^2} in [1/C, C] for every u on the grid.
    double equivalence_bound() const
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram_, Eigen::EigenvaluesOnly);
        const double lo = std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
        const double hi = std::sqrt(eig.eigenvalues()(eig.eigenvalues().size() - 1));
        return lo > 0.0 ? std::max(hi, 1.0 / lo) : std::numeric_limits<double>::infinity();
    }

private:
    PhaseGrid grid_;
    std::string weight_;
    std::string family_;
    CMatrix gram_;
};

inline SobolevReport sobolev_norm(const CVector& u, const Weight& m, const ConfinedFamily& family)
{
    return SobolevNorm(m, family)(u);
}

} // namespace psido
