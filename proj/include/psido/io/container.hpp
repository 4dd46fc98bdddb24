#pragma once

#include "psido/error.hpp"
#include "psido/quantize/operator_matrix.hpp"
#include "psido/symbols/symbol_grid.hpp"

#include "json.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace psido::io {

// Layout: 8-byte magic, uint32 version, uint32 reserved (all little-endian),
// uint64 metadata length, UTF-8 JSON metadata, then row-major complex64
// (float32 re, float32 im) samples.
inline constexpr std::array<char, 8> container_magic{'P', 'S', 'I', 'D', 'O', 'G', 'R', 'D'};
inline constexpr std::uint32_t container_version = 1;

struct Container {
    nlohmann::json meta;
    std::vector<std::uint64_t> shape;
    std::vector<std::complex<float>> data;
};

namespace detail {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path)
{
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw Error(ErrorKind::Io, path + ": truncated container header");
    }
    return v;
}

} // namespace detail

inline void write_container(const std::string& path, const Container& c)
{
    std::uint64_t count = 1;
    for (auto s : c.shape) {
        count *= s;
    }
    if (count != c.data.size()) {
        throw Error(ErrorKind::DimensionMismatch, "container shape does not match its payload");
    }
    nlohmann::json meta = c.meta;
    meta["shape"] = c.shape;
    meta["dtype"] = "complex64";
    meta["order"] = "row-major";
    const std::string text = meta.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    }
    out.write(container_magic.data(), container_magic.size());
    detail::put<std::uint32_t>(out, container_version);
    detail::put<std::uint32_t>(out, 0);
    detail::put<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.write(reinterpret_cast<const char*>(c.data.data()),
              static_cast<std::streamsize>(c.data.size() * sizeof(std::complex<float>)));
    if (!out) {
        throw Error(ErrorKind::Io, "write to " + path + " failed");
    }
}

inline Container read_container(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != container_magic) {
        throw Error(ErrorKind::Io, path + ": not a psido grid container");
    }
    const auto version = detail::get<std::uint32_t>(in, path);
    if (version != container_version) {
        throw Error(ErrorKind::Io, path + ": unsupported container version " + std::to_string(version));
    }
    detail::get<std::uint32_t>(in, path);
    const auto length = detail::get<std::uint64_t>(in, path);
    std::string text(length, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
        throw Error(ErrorKind::Io, path + ": truncated metadata block");
    }
    Container c;
    try {
        c.meta = nlohmann::json::parse(text);
        c.shape = c.meta.at("shape").get<std::vector<std::uint64_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Io, path + ": bad metadata: " + e.what());
    }
    std::uint64_t count = 1;
    for (auto s : c.shape) {
        count *= s;
    }
    c.data.resize(count);
    if (!in.read(reinterpret_cast<char*>(c.data.data()),
                 static_cast<std::streamsize>(count * sizeof(std::complex<float>)))) {
        throw Error(ErrorKind::Io, path + ": truncated payload");
    }
    return c;
}

inline nlohmann::json grid_meta(const PhaseGrid& g)
{
    return {{"L_x", g.lx()}, {"L_xi", g.lxi()}, {"N_x", g.nx()}, {"N_xi", g.nxi()}};
}

/// Symbol samples with shape [N_x, N_xi, d, d].
inline Container to_container(const SymbolGrid& a)
{
    Container c;
    c.meta = {{"kind", "symbol"}, {"grid", grid_meta(a.grid())}, {"weight", a.weight_label()},
              {"metric", a.metric_label()}};
    const auto nx = static_cast<std::uint64_t>(a.grid().nx());
    const auto nxi = static_cast<std::uint64_t>(a.grid().nxi());
    const auto d = static_cast<std::uint64_t>(a.d());
    c.shape = {nx, nxi, d, d};
    c.data.reserve(nx * nxi * d * d);
    for (int p = 0; p < a.grid().nx(); ++p) {
        for (int l = 0; l < a.grid().nxi(); ++l) {
            for (int i = 0; i < a.d(); ++i) {
                for (int j = 0; j < a.d(); ++j) {
                    c.data.emplace_back(a.plane(i, j)(p, l));
                }
            }
        }
    }
    return c;
}

/// Operator matrix with shape [n, n].
inline Container to_container(const OperatorMatrix& op)
{
    Container c;
    c.meta = {{"kind", "operator"}, {"grid", grid_meta(op.grid())}, {"d", op.d()}};
    const auto n = static_cast<std::uint64_t>(op.size());
    c.shape = {n, n};
    c.data.reserve(n * n);
    for (Eigen::Index r = 0; r < op.size(); ++r) {
        for (Eigen::Index k = 0; k < op.size(); ++k) {
            c.data.emplace_back(op.matrix()(r, k));
        }
    }
    return c;
}

inline SymbolGrid symbol_from_container(const Container& c)
{
    if (c.meta.value("kind", "") != "symbol" || c.shape.size() != 4 || c.shape[2] != c.shape[3]) {
        throw Error(ErrorKind::Io, "container does not hold a symbol grid");
    }
    const auto& g = c.meta.at("grid");
    const PhaseGrid grid(g.at("L_x").get<double>(), g.at("L_xi").get<double>(), g.at("N_x").get<int>(),
                         g.at("N_xi").get<int>());
    const int d = static_cast<int>(c.shape[2]);
    if (c.shape[0] != static_cast<std::uint64_t>(grid.nx()) || c.shape[1] != static_cast<std::uint64_t>(grid.nxi())) {
        throw Error(ErrorKind::Io, "symbol container shape disagrees with its grid");
    }
    SymbolGrid a(grid, d, c.meta.value("weight", ""), c.meta.value("metric", ""));
    std::size_t k = 0;
    for (int p = 0; p < grid.nx(); ++p) {
        for (int l = 0; l < grid.nxi(); ++l) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    a.plane(i, j)(p, l) = cplx(c.data[k++]);
                }
            }
        }
    }
    return a;
}

} // namespace psido::io
