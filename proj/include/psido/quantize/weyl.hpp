#pragma once

#include "psido/quantize/operator_matrix.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <vector>

namespace psido {

enum class Taper { Off, On, Auto };

struct QuantizeOptions {
    Taper taper = Taper::Off;
};

namespace detail {

/// Periodic half-node interpolation along the spatial index, 10-point
/// Lagrange stencils.
inline constexpr int half_order = 10;

inline std::array<double, half_order> lagrange_weights(const std::array<double, half_order>& nodes, double t)
{
    std::array<double, half_order> w{};
    for (int i = 0; i < half_order; ++i) {
        double v = 1.0;
        for (int j = 0; j < half_order; ++j) {
            if (j != i) {
                v *= (t - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        w[i] = v;
    }
    return w;
}

/// out(m, :) = value at node m + 1/2 from nodes m-4 .. m+5.
inline CMatrix to_half(const CMatrix& v)
{
    static const auto w = [] {
        std::array<double, half_order> nodes{};
        for (int i = 0; i < half_order; ++i) {
            nodes[i] = i - half_order / 2 + 1;
        }
        return lagrange_weights(nodes, 0.5);
    }();
    const int n = static_cast<int>(v.rows());
    CMatrix out = CMatrix::Zero(v.rows(), v.cols());
    for (int m = 0; m < n; ++m) {
        for (int i = 0; i < half_order; ++i) {
            const int src = ((m + i - half_order / 2 + 1) % n + n) % n;
            out.row(m) += w[i] * v.row(src);
        }
    }
    return out;
}

/// Inverse direction: value at node p from half nodes p-5+1/2 .. p+4+1/2.
inline CMatrix from_half(const CMatrix& h)
{
    static const auto w = [] {
        std::array<double, half_order> nodes{};
        for (int i = 0; i < half_order; ++i) {
            nodes[i] = i - half_order / 2 + 0.5;
        }
        return lagrange_weights(nodes, 0.0);
    }();
    const int n = static_cast<int>(h.rows());
    CMatrix out = CMatrix::Zero(h.rows(), h.cols());
    for (int p = 0; p < n; ++p) {
        for (int i = 0; i < half_order; ++i) {
            const int src = ((p + i - half_order / 2) % n + n) % n;
            out.row(p) += w[i] * h.row(src);
        }
    }
    return out;
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

/// Signed kernel offset for the periodic difference sigma in [0, N).
inline int signed_offset(int sigma, int n) { return sigma < n / 2 ? sigma : sigma - n; }

/// Weyl matrix of one scalar plane a(p, l) on a Fourier-compatible grid.
/// E(p, sigma) = (-1)^sigma ifft_l(a(p, l))[sigma] is the kernel times dx at
/// midpoint node p and offset sigma; entries with odd offsets use the
/// half-node interpolant of E.
inline CMatrix quantize_plane(const CMatrix& a)
{
    const int n = static_cast<int>(a.rows());
    Eigen::FFT<double> fft;
    CMatrix e(n, n);
    std::vector<cplx> in(n);
    std::vector<cplx> out(n);
    for (int p = 0; p < n; ++p) {
        for (int l = 0; l < n; ++l) {
            in[l] = a(p, l);
        }
        fft.inv(out, in);
        for (int s = 0; s < n; ++s) {
            e(p, s) = (s % 2 == 0) ? out[s] : -out[s];
        }
    }
    const CMatrix eh = to_half(e);
    CMatrix m(n, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            const int sigma = wrap(j - k, n);
            const int s = signed_offset(sigma, n);
            const int q2 = wrap(2 * k + s, 2 * n);
            if (sigma == n / 2) {
                const int q = wrap(q2 / 2, n);
                m(j, k) = 0.5 * (e(q, sigma) + e(wrap(q + n / 2, n), sigma));
            } else if (s % 2 == 0) {
                m(j, k) = e(wrap(q2 / 2, n), sigma);
            } else {
                m(j, k) = eh(wrap((q2 - 1) / 2, n), sigma);
            }
        }
    }
    return m;
}

/// Inverse of quantize_plane (discrete Wigner transform of the kernel).
inline CMatrix dequantize_plane(const CMatrix& m)
{
    const int n = static_cast<int>(m.rows());
    CMatrix e(n, n);
    CMatrix h(n, n);
    for (int sigma = 0; sigma < n; ++sigma) {
        const int s = signed_offset(sigma, n);
        if (s % 2 == 0) {
            for (int p = 0; p < n; ++p) {
                e(p, sigma) = m(wrap(p + s / 2, n), wrap(p - s / 2, n));
            }
        } else {
            for (int p = 0; p < n; ++p) {
                h(p, sigma) = m(wrap(p + (s + 1) / 2, n), wrap(p - (s - 1) / 2, n));
            }
        }
    }
    const CMatrix eo = from_half(h);
    Eigen::FFT<double> fft;
    std::vector<cplx> in(n);
    std::vector<cplx> out(n);
    CMatrix a(n, n);
    for (int p = 0; p < n; ++p) {
        for (int sigma = 0; sigma < n; ++sigma) {
            const cplx v = (signed_offset(sigma, n) % 2 == 0) ? e(p, sigma) : eo(p, sigma);
            in[sigma] = (sigma % 2 == 0) ? v : -v;
        }
        fft.fwd(out, in);
        for (int l = 0; l < n; ++l) {
            a(p, l) = out[l];
        }
    }
    return a;
}

} // namespace detail

/// Smooth cutoff in xi: 1 on |xi| <= 0.7 L_xi, falling to 0 across a band
/// of width 5% of L_xi centred at 0.8 L_xi.
inline double taper_window(double xi, double lxi)
{
    return 0.5 * std::erfc(2.0 * (std::abs(xi) - 0.8 * lxi) / (0.05 * lxi));
}

inline SymbolGrid taper(const SymbolGrid& a)
{
    const double lxi = a.grid().lxi();
    return a.scaled([lxi](double, double xi) { return taper_window(xi, lxi); });
}

/// Fraction of the symbol's mass (sum of |entries|) at |xi| >= 0.9 L_xi.
inline double boundary_mass_fraction(const SymbolGrid& a)
{
    const PhaseGrid& g = a.grid();
    double edge = 0.0;
    double total = 0.0;
    for (int i = 0; i < a.d(); ++i) {
        for (int j = 0; j < a.d(); ++j) {
            const CMatrix& pl = a.plane(i, j);
            for (int p = 0; p < g.nx(); ++p) {
                for (int l = 0; l < g.nxi(); ++l) {
                    const double v = std::abs(pl(p, l));
                    total += v;
                    if (std::abs(g.xi(l)) >= 0.9 * g.lxi()) {
                        edge += v;
                    }
                }
            }
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

inline bool aliasing_risk(const SymbolGrid& a) { return boundary_mass_fraction(a) > 1e-6; }

/// Discrete Weyl quantization on a Fourier-compatible grid.
inline OperatorMatrix weyl_quantize(const SymbolGrid& a, const QuantizeOptions& opts = {})
{
    const PhaseGrid& grid = a.grid();
    grid.require_fourier();
    const bool risk = aliasing_risk(a);
    const bool apply = opts.taper == Taper::On || (opts.taper == Taper::Auto && risk);
    const SymbolGrid src = apply ? taper(a) : a;
    const int n = grid.nx();
    const int d = a.d();
    CMatrix m(static_cast<Eigen::Index>(d) * n, static_cast<Eigen::Index>(d) * n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const CMatrix block = detail::quantize_plane(src.plane(i, j));
            for (int k = 0; k < n; ++k) {
                for (int r = 0; r < n; ++r) {
                    m(r * d + i, k * d + j) = block(r, k);
                }
            }
        }
    }
    OperatorMatrix out(grid, d, std::move(m));
    out.windowed = apply;
    out.aliasing_warning = risk && !apply;
    return out;
}

inline SymbolGrid dequantize(const OperatorMatrix& op)
{
    const PhaseGrid& grid = op.grid();
    grid.require_fourier();
    const int n = grid.nx();
    const int d = op.d();
    SymbolGrid out(grid, d);
    CMatrix block(n, n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int r = 0; r < n; ++r) {
                    block(r, k) = op.matrix()(r * d + i, k * d + j);
                }
            }
            out.plane(i, j) = detail::dequantize_plane(block);
        }
    }
    return out;
}

} // namespace psido
