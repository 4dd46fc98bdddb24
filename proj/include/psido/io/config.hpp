#pragma once

#include "psido/error.hpp"
#include "psido/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>

namespace psido::io {

struct Config {
    double L_x = 8.0;
    double L_xi = 8.0;             // sampling box for metric scans; quantization grids derive their own L_xi
    int N_x = 256;
    std::string metric = "shubin";
    std::string weight = "one";    // M
    std::string weight1 = "one";   // M1
    double rank_tol = 1e-8;
    double residual_tol = 1e-5;
    std::uint64_t seed = 42;
    std::string output_dir = "psido-out";
    bool fast_delta = false;
};

/// Validates invariants; throws Config naming the offending field.
inline void validate(const Config& c)
{
    auto bad = [](const std::string& field, const std::string& why) {
        throw Error(ErrorKind::Config, "config field '" + field + "': " + why);
    };
    if (!is_power_of_two(c.N_x) || c.N_x < 64 || c.N_x > 2048) {
        bad("grid.N_x", "must be a power of two in [64, 2048], got " + std::to_string(c.N_x));
    }
    if (!(c.L_x > 0.0) || !std::isfinite(c.L_x)) {
        bad("grid.L_x", "must be positive");
    }
    if (!(c.L_xi > 0.0) || !std::isfinite(c.L_xi)) {
        bad("grid.L_xi", "must be positive");
    }
    if (!(c.rank_tol > 0.0) || !std::isfinite(c.rank_tol)) {
        bad("tolerances.rank_tol", "must be positive");
    }
    if (!(c.residual_tol > 0.0) || !std::isfinite(c.residual_tol)) {
        bad("tolerances.residual_tol", "must be positive");
    }
    if (c.output_dir.empty()) {
        bad("output_dir", "must not be empty");
    }
}

/// Normalized form: every field present, fixed key order.
inline nlohmann::ordered_json serialize(const Config& c)
{
    nlohmann::ordered_json j;
    j["grid"] = {{"L_x", c.L_x}, {"L_xi", c.L_xi}, {"N_x", c.N_x}};
    j["metric"] = c.metric;
    j["weights"] = {{"M", c.weight}, {"M1", c.weight1}};
    j["tolerances"] = {{"rank_tol", c.rank_tol}, {"residual_tol", c.residual_tol}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["fast_delta"] = c.fast_delta;
    return j;
}

/// FNV-1a over the normalized serialization.
inline std::uint64_t config_hash(const Config& c)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : serialize(c).dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            throw Error(ErrorKind::Config, "unknown config key '" + where + key + "'");
        }
    }
}

template <class T>
void read(const nlohmann::json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key)) {
        return;
    }
    const auto& v = obj.at(key);
    bool ok = true;
    if constexpr (std::is_same_v<T, bool>) {
        ok = v.is_boolean();
    } else if constexpr (std::is_unsigned_v<T>) {
        ok = v.is_number_unsigned();
    } else if constexpr (std::is_integral_v<T>) {
        ok = v.is_number_integer();
    } else if constexpr (std::is_floating_point_v<T>) {
        ok = v.is_number();
    } else {
        ok = v.is_string();
    }
    if (!ok) {
        throw Error(ErrorKind::Config, "config field '" + where + key + "' has the wrong type");
    }
    try {
        out = v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Config, "config field '" + where + key + "' has the wrong type");
    }
}

inline const nlohmann::json& section(const nlohmann::json& root, const char* key)
{
    static const nlohmann::json empty = nlohmann::json::object();
    if (!root.contains(key)) {
        return empty;
    }
    if (!root.at(key).is_object()) {
        throw Error(ErrorKind::Config, std::string("config field '") + key + "' must be an object");
    }
    return root.at(key);
}

inline std::size_t line_of(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
        }
    }
    return line;
}

} // namespace detail

inline Config parse_config(const std::string& text, const std::string& source = "<config>")
{
    Config c;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return c;
    }
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte is 1-based and points just past the offending character
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw Error(ErrorKind::Config, source + ":" + std::to_string(detail::line_of(text, at)) + ": parse error: " +
                                           e.what());
    }
    if (!root.is_object()) {
        throw Error(ErrorKind::Config, source + ": top level must be a JSON object");
    }
    detail::reject_unknown(root, {"grid", "metric", "weights", "tolerances", "seed", "output_dir", "fast_delta"}, "");
    const auto& grid = detail::section(root, "grid");
    detail::reject_unknown(grid, {"L_x", "L_xi", "N_x"}, "grid.");
    detail::read(grid, "L_x", c.L_x, "grid.");
    detail::read(grid, "L_xi", c.L_xi, "grid.");
    detail::read(grid, "N_x", c.N_x, "grid.");
    detail::read(root, "metric", c.metric, "");
    const auto& weights = detail::section(root, "weights");
    detail::reject_unknown(weights, {"M", "M1"}, "weights.");
    detail::read(weights, "M", c.weight, "weights.");
    detail::read(weights, "M1", c.weight1, "weights.");
    const auto& tol = detail::section(root, "tolerances");
    detail::reject_unknown(tol, {"rank_tol", "residual_tol"}, "tolerances.");
    detail::read(tol, "rank_tol", c.rank_tol, "tolerances.");
    detail::read(tol, "residual_tol", c.residual_tol, "tolerances.");
    detail::read(root, "seed", c.seed, "");
    detail::read(root, "output_dir", c.output_dir, "");
    detail::read(root, "fast_delta", c.fast_delta, "");
    validate(c);
    return c;
}

inline Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Config, "cannot read config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

} // namespace psido::io
