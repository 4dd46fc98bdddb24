#pragma once

#include "psido/quantize/poly_symbol.hpp"
#include "psido/quantize/weyl.hpp"

namespace psido {

struct MoyalResult {
    SymbolGrid symbol;
    bool windowed = false;
    bool aliasing_warning = false;
};

/// a # b through the algebra morphism: dequantize(a^w b^w). Symbols with
/// mass near the xi-boundary are tapered first (Taper::Auto), which the
/// flags report.
inline MoyalResult moyal_with_flags(const SymbolGrid& a, const SymbolGrid& b, const QuantizeOptions& opts = {Taper::Auto})
{
    a.require_compatible(b);
    const OperatorMatrix prod = weyl_quantize(a, opts) * weyl_quantize(b, opts);
    return {dequantize(prod), prod.windowed, prod.aliasing_warning};
}

inline SymbolGrid moyal(const SymbolGrid& a, const SymbolGrid& b, const QuantizeOptions& opts = {Taper::Auto})
{
    return moyal_with_flags(a, b, opts).symbol;
}

} // namespace psido
