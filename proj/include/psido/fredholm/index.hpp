#pragma once

#include "psido/quantize/operator_matrix.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace psido {

struct IndexOptions {
    double rank_tol = 1e-8;        // relative to sigma_max
    double gap_ratio = 10.0;       // sigma above tol / max(sigma below, tol)
    double core_mass = 0.5;        // null vectors below this core mass are boundary modes
    double gap_stability = 0.75;   // sigma_gap(N_{i+1}) / sigma_gap(N_i) must stay above this
    int min_truncations = 3;
};

struct TruncationIndex {
    int nx = 0;
    int dim_ker = 0;
    int dim_coker = 0;
    int boundary_modes = 0;        // null vectors pinned to the edge of the box
    double sigma_max = 0.0;
    double tol = 0.0;
    double sigma_below = 0.0;      // largest singular value under tol
    double sigma_gap = 0.0;        // smallest singular value above tol
    double gap_ratio = 0.0;
    bool gap_ok = false;
    Eigen::VectorXd sigma;         // descending
    CMatrix kernel;                // orthonormal interior null vectors of A
    CMatrix cokernel;              // orthonormal interior null vectors of A*

    int index() const { return dim_ker - dim_coker; }
};

struct IndexReport {
    int dim_ker = 0;
    int dim_coker = 0;
    int index = 0;
    double rank_tol = 0.0;
    std::vector<TruncationIndex> truncations;
    bool gap_stable = false;       // per-truncation gaps hold and sigma_gap does not collapse with N
    bool stable = false;           // gap_stable and one index across >= min_truncations sizes
};

namespace detail {

/// Fraction of |v|^2 on |x| <= L_x/2, and of |v^|^2 on |xi| <= L_xi/2; the smaller one.
inline double core_mass(const PhaseGrid& grid, int d, const CVector& v)
{
    const int n = grid.nx();
    double in_x = 0.0;
    double total = 0.0;
    std::vector<double> freq(n, 0.0);
    Eigen::FFT<double> fft;
    for (int a = 0; a < d; ++a) {
        std::vector<cplx> comp(n);
        for (int j = 0; j < n; ++j) {
            comp[j] = v(j * d + a);
            const double m = std::norm(comp[j]);
            total += m;
            if (std::abs(grid.x(j)) <= 0.5 * grid.lx()) {
                in_x += m;
            }
        }
        std::vector<cplx> spectrum;
        fft.fwd(spectrum, comp);
        for (int k = 0; k < n; ++k) {
            freq[k] += std::norm(spectrum[k]);
        }
    }
    if (total == 0.0) {
        return 0.0;
    }
    double in_xi = 0.0;
    double total_xi = 0.0;
    for (int k = 0; k < n; ++k) {
        const int s = k < n / 2 ? k : k - n;
        total_xi += freq[k];
        if (std::abs(s * grid.dxi()) <= 0.5 * grid.lxi()) {
            in_xi += freq[k];
        }
    }
    return std::min(in_x / total, in_xi / total_xi);
}

inline CMatrix select_columns(const CMatrix& m, const std::vector<Eigen::Index>& cols)
{
    CMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
    }
    return out;
}

} // namespace detail

/// Kernel and cokernel counts of one truncation. The cokernel is the kernel of
/// A*, read off the left singular vectors of the same SVD. A square
/// truncation always has equal counts; the index appears only after null
/// vectors stuck at the box edge (periodic-wrap artifacts) are set aside.
inline TruncationIndex index_at(const OperatorMatrix& a, const IndexOptions& opts = {})
{
    TruncationIndex t;
    t.nx = a.grid().nx();
    Eigen::BDCSVD<CMatrix> svd(a.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    t.sigma = svd.singularValues();
    const Eigen::Index n = t.sigma.size();
    t.sigma_max = n > 0 ? t.sigma(0) : 0.0;
    t.tol = opts.rank_tol * t.sigma_max;
    t.sigma_gap = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> ker;
    std::vector<Eigen::Index> coker;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = t.sigma(i);
        if (s >= t.tol && s > 0.0) {
            t.sigma_gap = std::min(t.sigma_gap, s);
            continue;
        }
        t.sigma_below = std::max(t.sigma_below, s);
        const CVector right = svd.matrixV().col(i);
        const CVector left = svd.matrixU().col(i);
        if (detail::core_mass(a.grid(), a.d(), right) >= opts.core_mass) {
            ker.push_back(i);
        } else {
            ++t.boundary_modes;
        }
        if (detail::core_mass(a.grid(), a.d(), left) >= opts.core_mass) {
            coker.push_back(i);
        } else {
            ++t.boundary_modes;
        }
    }
    t.dim_ker = static_cast<int>(ker.size());
    t.dim_coker = static_cast<int>(coker.size());
    t.kernel = detail::select_columns(svd.matrixV(), ker);
    t.cokernel = detail::select_columns(svd.matrixU(), coker);
    if (t.sigma_max == 0.0) {
        t.gap_ratio = 0.0;
    } else {
        t.gap_ratio = t.sigma_gap / std::max(t.sigma_below, t.tol);
    }
    t.gap_ok = t.sigma_max > 0.0 && t.gap_ratio >= opts.gap_ratio;
    return t;
}

struct IndexScan {
    IndexReport report;
    std::string gap_failure;   // empty when the gap is stable
};

/// Index of a^w across truncations N_x without throwing on a missing gap.
/// `build` returns the operator at a given N_x.
inline IndexScan index_scan(const std::function<OperatorMatrix(int)>& build, const std::vector<int>& truncations,
                            const IndexOptions& opts = {})
{
    if (static_cast<int>(truncations.size()) < opts.min_truncations) {
        throw Error(ErrorKind::Precondition, "index stability needs at least " + std::to_string(opts.min_truncations) +
                                                 " truncation sizes");
    }
    IndexReport rep;
    rep.rank_tol = opts.rank_tol;
    for (int nx : truncations) {
        rep.truncations.push_back(index_at(build(nx), opts));
    }
    rep.gap_stable = true;
    std::string why;
    for (std::size_t i = 0; i < rep.truncations.size(); ++i) {
        const TruncationIndex& t = rep.truncations[i];
        if (!t.gap_ok) {
            rep.gap_stable = false;
            why = "gap ratio " + std::to_string(t.gap_ratio) + " below " + std::to_string(opts.gap_ratio) +
                  " at N_x = " + std::to_string(t.nx);
            break;
        }
        if (i > 0 && t.sigma_gap < opts.gap_stability * rep.truncations[i - 1].sigma_gap) {
            rep.gap_stable = false;
            why = "smallest nonzero singular value drops from " + std::to_string(rep.truncations[i - 1].sigma_gap) +
                  " to " + std::to_string(t.sigma_gap) + " at N_x = " + std::to_string(t.nx);
            break;
        }
    }
    const TruncationIndex& last = rep.truncations.back();
    rep.dim_ker = last.dim_ker;
    rep.dim_coker = last.dim_coker;
    rep.index = last.index();
    bool same = true;
    for (const auto& t : rep.truncations) {
        same = same && t.index() == rep.index;
    }
    rep.stable = rep.gap_stable && same;
    return {std::move(rep), std::move(why)};
}

/// As index_scan, but a failed gap check (anywhere, or a smallest nonzero
/// singular value collapsing as N_x grows) is an error.
inline IndexReport numerical_index(const std::function<OperatorMatrix(int)>& build, const std::vector<int>& truncations,
                                   const IndexOptions& opts = {})
{
    IndexScan scan = index_scan(build, truncations, opts);
    if (!scan.report.gap_stable) {
        throw Error(ErrorKind::NoSpectralGap, "no stable spectral gap: " + scan.gap_failure);
    }
    return std::move(scan.report);
}

/// Single-truncation variant; never reports stability.
inline IndexReport numerical_index(const OperatorMatrix& a, const IndexOptions& opts = {})
{
    IndexReport rep;
    rep.rank_tol = opts.rank_tol;
    rep.truncations.push_back(index_at(a, opts));
    const TruncationIndex& t = rep.truncations.back();
    if (!t.gap_ok) {
        throw Error(ErrorKind::NoSpectralGap, "gap ratio " + std::to_string(t.gap_ratio) + " below " +
                                                  std::to_string(opts.gap_ratio));
    }
    rep.dim_ker = t.dim_ker;
    rep.dim_coker = t.dim_coker;
    rep.index = t.index();
    rep.gap_stable = true;
    return rep;
}

} // namespace psido
