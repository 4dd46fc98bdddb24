#pragma once

#include "psido/inversion/family.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace psido {

struct RegularityOrder {
    int order = 0;
    double error_h = 0.0;    // max over interior lambda at step h
    double error_2h = 0.0;   // same at step 2h
    double slope = 0.0;      // log2(error_2h / error_h)
};

struct RegularityReport {
    double h = 0.0;
    std::vector<RegularityOrder> orders;
};

namespace detail {

inline CMatrix cd(const std::vector<CMatrix>& f, std::size_t i, std::size_t s, double h, int q)
{
    switch (q) {
    case 1: return (f[i + s] - f[i - s]) / (2.0 * h);
    case 2: return (f[i + s] - 2.0 * f[i] + f[i - s]) / (h * h);
    default: return (f[i + 2 * s] - 2.0 * f[i + s] + 2.0 * f[i - s] - f[i - 2 * s]) / (2.0 * h * h * h);
    }
}

inline std::size_t reach(int q) { return q == 3 ? 2 : 1; }

} // namespace detail

/// Lambda-derivatives of the inverse family through the identity
/// db = -b a' b and its iterates:
///   d2b = 2 b a' b a' b - b a'' b
///   d3b = -6 b a' b a' b a' b + 3 (b a'' b a' b + b a' b a'' b) - b a''' b
/// with # products realized by operator composition.
inline CMatrix derivative_identity(const CMatrix& b, const std::array<CMatrix, 3>& da, int q)
{
    const CMatrix& a1 = da[0];
    switch (q) {
    case 1: return -(b * a1 * b);
    case 2: return 2.0 * (b * a1 * b * a1 * b) - b * da[1] * b;
    case 3: {
        const CMatrix ba1b = b * a1 * b;
        const CMatrix ba2b = b * da[1] * b;
        return -6.0 * (ba1b * a1 * ba1b) + 3.0 * (ba2b * a1 * b + ba1b * da[1] * b) - b * da[2] * b;
    }
    default: throw Error(ErrorKind::Precondition, "derivative order must be 1, 2 or 3");
    }
}

/// Compares finite differences of b_lambda with the derivative identity at
/// step h and 2h for each order q <= N; errors are sup norms on the core box.
inline RegularityReport regularity_check(const SymbolFamily& family, const SymbolFamily& inverses, int N)
{
    if (N < 1 || N > 3) {
        throw Error(ErrorKind::Precondition, "regularity orders are limited to 1 <= N <= 3");
    }
    if (family.size() != inverses.size()) {
        throw Error(ErrorKind::DimensionMismatch, "family and inverse family differ in length");
    }
    if (static_cast<int>(family.size()) < 2 * N + 3) {
        throw Error(ErrorKind::InsufficientSamples, "regularity of order " + std::to_string(N) + " needs at least " +
                                                        std::to_string(2 * N + 3) + " lambda samples");
    }
    std::vector<CMatrix> A;
    std::vector<CMatrix> B;
    for (std::size_t i = 0; i < family.size(); ++i) {
        A.push_back(weyl_quantize(family[i]).matrix());
        B.push_back(weyl_quantize(inverses[i]).matrix());
    }
    const PhaseGrid& grid = family[0].grid();
    const int d = family[0].d();
    auto core_norm = [&](const CMatrix& m) { return dequantize(OperatorMatrix(grid, d, m)).max_abs_core(); };
    RegularityReport rep;
    rep.h = family.step();
    for (int q = 1; q <= N; ++q) {
        RegularityOrder ord;
        ord.order = q;
        for (std::size_t s : {std::size_t{1}, std::size_t{2}}) {
            const double h = family.step() * static_cast<double>(s);
            const std::size_t margin = s * detail::reach(q);
            double worst = 0.0;
            for (std::size_t i = margin; i + margin < family.size(); ++i) {
                std::array<CMatrix, 3> da;
                for (int k = 1; k <= 3; ++k) {
                    da[k - 1] = k <= q ? detail::cd(A, i, s, h, k) : CMatrix::Zero(A[i].rows(), A[i].cols());
                }
                const CMatrix fd = detail::cd(B, i, s, h, q);
                worst = std::max(worst, core_norm(fd - derivative_identity(B[i], da, q)));
            }
            (s == 1 ? ord.error_h : ord.error_2h) = worst;
        }
        ord.slope = (ord.error_h > 0.0 && ord.error_2h > 0.0) ? std::log2(ord.error_2h / ord.error_h) : 0.0;
        rep.orders.push_back(ord);
    }
    return rep;
}

} // namespace psido
