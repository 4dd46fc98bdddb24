#pragma once

#include "psido/linalg.hpp"
#include "psido/quantize/weyl.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace psido {

struct CompactnessOptions {
    int k = 50;                    // tracked index (1-based)
    double small = 1e-3;           // k* is the first k with sigma_k below this
    double stability = 0.05;       // relative spread of sigma_k across truncations
};

struct TruncationSpectrum {
    int nx = 0;
    Eigen::VectorXd sigma;         // descending
    double sigma_k = 0.0;
    std::optional<int> k_star;     // 1-based
    bool monotone = true;
};

struct CompactnessReport {
    int k = 0;
    std::vector<TruncationSpectrum> truncations;
    double sigma_k_spread = 0.0;   // (max - min) / max over truncations
    bool stable = false;
    bool sigma_k_nonincreasing = false;   // in the truncation size
};

inline TruncationSpectrum spectrum_at(const OperatorMatrix& a, const CompactnessOptions& opts = {})
{
    TruncationSpectrum t;
    t.nx = a.grid().nx();
    t.sigma = linalg::singular_values(a.matrix());
    const Eigen::Index n = t.sigma.size();
    t.sigma_k = opts.k <= n ? t.sigma(opts.k - 1) : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0 && t.sigma(i) > t.sigma(i - 1)) {
            t.monotone = false;
        }
        if (!t.k_star && t.sigma(i) < opts.small) {
            t.k_star = static_cast<int>(i + 1);
        }
    }
    return t;
}

/// Singular values of a^w on increasing truncations, tracking sigma_k.
inline CompactnessReport compactness_probe(const std::function<SymbolGrid(const PhaseGrid&)>& symbol, double lx,
                                           const std::vector<int>& truncations, const CompactnessOptions& opts = {})
{
    if (opts.k < 1) {
        throw Error(ErrorKind::Precondition, "tracked singular value index must be >= 1");
    }
    CompactnessReport rep;
    rep.k = opts.k;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    rep.sigma_k_nonincreasing = true;
    for (int nx : truncations) {
        const SymbolGrid a = symbol(PhaseGrid::fourier(lx, nx));
        rep.truncations.push_back(spectrum_at(weyl_quantize(a), opts));
        const double s = rep.truncations.back().sigma_k;
        if (rep.truncations.size() > 1 && s > rep.truncations[rep.truncations.size() - 2].sigma_k * (1.0 + 1e-9)) {
            rep.sigma_k_nonincreasing = false;
        }
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    rep.sigma_k_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    rep.stable = !truncations.empty() && rep.sigma_k_spread <= opts.stability;
    return rep;
}

} // namespace psido
