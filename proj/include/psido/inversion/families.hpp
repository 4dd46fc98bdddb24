#pragma once

#include "psido/inversion/family.hpp"
#include "psido/symbols/registry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace psido::families {

/// lambda -> a_lambda on a given grid.
using FamilyFn = std::function<SymbolGrid(double, const PhaseGrid&)>;

/// Ids: "gauss-ramp[:c]" (1 + c lambda e^{-|X|^2}, c = 0.3), "scalar-quadratic"
/// ((1 + lambda^2) 1), "phase" (e^{i lambda} 1), "constant:<symbol id>".
inline FamilyFn by_name(const std::string& id)
{
    if (id == "gauss-ramp" || id.rfind("gauss-ramp:", 0) == 0) {
        const double c = id == "gauss-ramp" ? 0.3 : symbols::detail::parse_real(id.substr(11), id);
        return [c](double lambda, const PhaseGrid& g) {
            return SymbolGrid::constant(g, 1) + symbols::sample("gauss", g) * cplx(c * lambda);
        };
    }
    if (id == "scalar-quadratic") {
        return [](double lambda, const PhaseGrid& g) { return SymbolGrid::constant(g, 1, cplx(1.0 + lambda * lambda)); };
    }
    if (id == "phase") {
        return [](double lambda, const PhaseGrid& g) { return SymbolGrid::constant(g, 1, std::exp(cplx(0.0, lambda))); };
    }
    if (id.rfind("constant:", 0) == 0) {
        const symbols::BuiltinSymbol s = symbols::by_name(id.substr(9));
        return [s](double, const PhaseGrid& g) { return s.sample(g); };
    }
    throw Error(ErrorKind::UnknownId, "unknown family id '" + id + "'");
}

inline std::vector<std::string> names() { return {"gauss-ramp[:c]", "scalar-quadratic", "phase", "constant:<symbol>"}; }

inline SymbolFamily sample(const FamilyFn& f, const PhaseGrid& grid, double lambda0, double step, int count)
{
    return SymbolFamily::sample([&](double l) { return f(l, grid); }, lambda0, step, count);
}

} // namespace psido::families
