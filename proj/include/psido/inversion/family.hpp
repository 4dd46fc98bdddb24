#pragma once

#include "psido/inversion/symbol_inverse.hpp"

#include <functional>
#include <string>
#include <vector>

namespace psido {

/// Symbols a_lambda sampled on a uniform parameter grid lambda_0 < ... < lambda_K.
class SymbolFamily {
public:
    SymbolFamily(double lambda0, double step, std::vector<SymbolGrid> members, int smoothness = 3)
        : lambda0_(lambda0)
        , step_(step)
        , members_(std::move(members))
        , smoothness_(smoothness)
    {
        if (members_.empty()) {
            throw Error(ErrorKind::InsufficientSamples, "family has no members");
        }
        if (!(step > 0.0)) {
            throw Error(ErrorKind::Precondition, "family step must be positive");
        }
        for (const auto& m : members_) {
            members_.front().require_compatible(m);
        }
    }

    /// Samples lambda -> f(lambda) at lambda0 + i*step, i = 0..count-1.
    static SymbolFamily sample(const std::function<SymbolGrid(double)>& f, double lambda0, double step, int count,
                               int smoothness = 3)
    {
        std::vector<SymbolGrid> members;
        for (int i = 0; i < count; ++i) {
            members.push_back(f(lambda0 + i * step));
        }
        return SymbolFamily(lambda0, step, std::move(members), smoothness);
    }

    double lambda(std::size_t i) const { return lambda0_ + static_cast<double>(i) * step_; }
    double step() const { return step_; }
    std::size_t size() const { return members_.size(); }
    int smoothness() const { return smoothness_; }
    const SymbolGrid& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<SymbolGrid>& members() const { return members_; }

private:
    double lambda0_;
    double step_;
    std::vector<SymbolGrid> members_;
    int smoothness_;
};

struct FamilyInverseReport {
    std::vector<double> residual;   // max of the two-sided residuals per member
    /// ||b_{i+1} - b_i|| / ||a_{i+1} - a_i|| on the core box (0 when a is constant).
    std::vector<double> continuity_ratio;
    std::vector<InverseReport> members;
};

struct FamilyInverse {
    SymbolFamily inverses;
    std::vector<OperatorMatrix> ops;
    FamilyInverseReport report;
};

inline FamilyInverse family_inverse_full(const SymbolFamily& family, const InverseOptions& opts = {})
{
    std::vector<SymbolGrid> inv;
    std::vector<OperatorMatrix> ops;
    FamilyInverseReport rep;
    for (std::size_t i = 0; i < family.size(); ++i) {
        try {
            SymbolInverse s = symbol_inverse_full(family[i], opts);
            rep.residual.push_back(std::max(s.report.residual_left, s.report.residual_right));
            rep.members.push_back(s.report);
            inv.push_back(std::move(s.symbol));
            ops.push_back(std::move(s.op));
        } catch (const Error& e) {
            throw Error(e.kind(), "family member " + std::to_string(i) + " (lambda = " +
                                      std::to_string(family.lambda(i)) + "): " + e.what());
        }
    }
    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        const double da = core_distance(family[i + 1], family[i]);
        const double db = core_distance(inv[i + 1], inv[i]);
        rep.continuity_ratio.push_back(da > 0.0 ? db / da : 0.0);
    }
    SymbolFamily out(family.lambda(0), family.step(), std::move(inv), family.smoothness());
    return {std::move(out), std::move(ops), std::move(rep)};
}

inline SymbolFamily family_inverse(const SymbolFamily& family, const InverseOptions& opts = {})
{
    return family_inverse_full(family, opts).inverses;
}

} // namespace psido
