#pragma once

#include "psido/inversion/neumann.hpp"
#include "psido/quantize/moyal.hpp"

#include <cmath>

namespace psido {

struct InverseOptions {
    NeumannOptions neumann;
    double max_condition = 1e8;
    double margin = 1.01;   // C = margin * ||a^w||^2
};

struct InverseReport {
    double C = 0.0;
    double condition = 0.0;
    double residual_left = 0.0;    // ||b # a - 1|| on the core box
    double residual_right = 0.0;   // ||a # b - 1|| on the core box
    NeumannReport neumann;
};

struct SymbolInverse {
    SymbolGrid symbol;
    OperatorMatrix op;   // (a^w)^{-1} as assembled from the series
    InverseReport report;
};

/// Two-sided # inverse through r = I - C^{-1} a* # a:
/// b = C^{-1} (1 - r)^{-1} # a*, all products on the operator side.
inline SymbolInverse symbol_inverse_full(const SymbolGrid& a, const InverseOptions& opts = {})
{
    const OperatorMatrix A = weyl_quantize(a);
    const Eigen::VectorXd sv = linalg::singular_values(A.matrix());
    InverseReport rep;
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    rep.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(rep.condition <= opts.max_condition)) {
        throw Error(ErrorKind::NonInvertible, "a^w is not invertible: condition number " +
                                                   std::to_string(rep.condition) + " exceeds the limit");
    }
    rep.C = opts.margin * smax * smax;
    const Eigen::Index n = A.size();
    const OperatorMatrix R = A.like(CMatrix::Identity(n, n) - A.matrix().adjoint() * A.matrix() / rep.C);
    auto [series, nrep] = neumann_operator(R, opts.neumann);
    rep.neumann = std::move(nrep);
    OperatorMatrix B = A.like(series.matrix() * A.matrix().adjoint() / rep.C);
    const SymbolGrid one = SymbolGrid::constant(a.grid(), a.d());
    rep.residual_left = core_distance(dequantize(B * A), one);
    rep.residual_right = core_distance(dequantize(A * B), one);
    SymbolGrid b = dequantize(B);
    return {std::move(b), std::move(B), std::move(rep)};
}

inline SymbolGrid symbol_inverse(const SymbolGrid& a, const InverseOptions& opts = {})
{
    return symbol_inverse_full(a, opts).symbol;
}

} // namespace psido
