#pragma once

#include "psido/error.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace psido::symbols {

/// A named built-in symbol: fiber dimension plus evaluator.
struct BuiltinSymbol {
    std::string name;
    int d = 1;
    MatrixSymbolFn eval;

    SymbolGrid sample(const PhaseGrid& grid) const
    {
        SymbolGrid s = SymbolGrid::sample(eval, grid, d);
        return s;
    }
};

namespace detail {

inline BuiltinSymbol scalar(std::string name, std::function<cplx(double, double)> f)
{
    return {std::move(name), 1, [f](double x, double xi) {
                CMatrix m(1, 1);
                m(0, 0) = f(x, xi);
                return m;
            }};
}

inline double parse_real(const std::string& text, const std::string& id)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || !std::isfinite(v)) {
        throw Error(ErrorKind::UnknownId, "bad numeric parameter in symbol id '" + id + "'");
    }
    return v;
}

} // namespace detail

inline BuiltinSymbol by_name(const std::string& id)
{
    using detail::scalar;
    if (id == "one") return scalar(id, [](double, double) { return cplx(1.0); });
    if (id == "harmonic") return scalar(id, [](double x, double xi) { return cplx(x * x + xi * xi); });
    if (id == "harmonic+1") return scalar(id, [](double x, double xi) { return cplx(x * x + xi * xi + 1.0); });
    if (id == "annihilation") return scalar(id, [](double x, double xi) { return cplx(x, xi); });
    if (id == "creation") return scalar(id, [](double x, double xi) { return cplx(x, -xi); });
    if (id == "vanishing") return scalar(id, [](double x, double xi) { return cplx(1.0 / japanese(x, xi)); });
    if (id == "directional-degenerate") return scalar(id, [](double x, double) { return cplx(x); });
    if (id == "x") return scalar(id, [](double x, double) { return cplx(x); });
    if (id == "xi") return scalar(id, [](double, double xi) { return cplx(xi); });
    if (id == "gauss") return scalar(id, [](double x, double xi) { return cplx(std::exp(-x * x - xi * xi)); });
    if (id == "normalized-annihilation") {
        return scalar(id, [](double x, double xi) { return cplx(x, xi) / japanese(x, xi); });
    }
    if (id == "normalized-degenerate") {
        return scalar(id, [](double x, double xi) { return cplx(x / japanese(x, xi)); });
    }
    if (id == "bump-perturbation") {
        return scalar(id, [](double x, double xi) { return cplx(1.0 + 0.4 * std::exp(-x * x - xi * xi)); });
    }
    if (id == "elliptic-2x2") {
        // [[x, xi], [-xi, x]]: det = x^2 + xi^2, elliptic of order <X> outside the origin.
        return {id, 2, [](double x, double xi) {
                    CMatrix m(2, 2);
                    m << x, xi, -xi, x;
                    return m;
                }};
    }
    const std::string prefix = "shubin-weight-s";
    if (id == prefix || id.rfind(prefix + ":", 0) == 0) {
        const double s = id == prefix ? 1.0 : detail::parse_real(id.substr(prefix.size() + 1), id);
        return scalar(id, [s](double x, double xi) { return cplx(std::pow(1.0 + x * x + xi * xi, 0.5 * s)); });
    }
    throw Error(ErrorKind::UnknownId, "unknown symbol id '" + id + "'");
}

inline std::vector<std::string> names()
{
    return {"one",
            "harmonic",
            "harmonic+1",
            "annihilation",
            "creation",
            "shubin-weight-s:S",
            "vanishing",
            "directional-degenerate",
            "x",
            "xi",
            "gauss",
            "normalized-annihilation",
            "normalized-degenerate",
            "bump-perturbation",
            "elliptic-2x2"};
}

inline SymbolGrid sample(const std::string& id, const PhaseGrid& grid) { return by_name(id).sample(grid); }

} // namespace psido::symbols
