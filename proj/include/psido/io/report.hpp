#pragma once

#include "psido/fredholm.hpp"
#include "psido/inversion/regularity.hpp"
#include "psido/io/config.hpp"
#include "psido/metric/axioms.hpp"
#include "psido/quantize/chain_decay.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

namespace psido::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* tool_version = "0.1.0";

enum class Status { Pass, Fail, Inconclusive };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline int exit_code(Status s)
{
    switch (s) {
    case Status::Pass: return 0;
    case Status::Fail: return 2;
    case Status::Inconclusive: return 3;
    }
    return 2;
}

/// Finite doubles as numbers, the rest as strings ("inf", "nan"), so reports
/// stay valid JSON.
inline Json num(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline Json point_json(const Point& p)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        a.push_back(num(p(i)));
    }
    return a;
}

inline Json grid_json(const PhaseGrid& g)
{
    return {{"L_x", num(g.lx())}, {"L_xi", num(g.lxi())}, {"N_x", g.nx()}, {"N_xi", g.nxi()}};
}

inline Json to_json(const SlowVariationFit& f) { return {{"C", num(f.C)}, {"r", num(f.r)}, {"pass", f.pass}}; }
inline Json to_json(const TemperanceFit& f) { return {{"C", num(f.C)}, {"N", f.N}, {"pass", f.pass}}; }

inline Json to_json(const AxiomReport& r)
{
    Json j = {{"metric", r.metric},
              {"slow_variation", to_json(r.slow_variation)},
              {"temperance", to_json(r.temperance)},
              {"uncertainty", r.uncertainty},
              {"samples_used", r.samples_used}};
    if (r.geodesic_temperance) {
        j["geodesic_temperance"] = to_json(*r.geodesic_temperance);
    }
    j["all_pass"] = r.all_pass();
    return j;
}

inline Json to_json(const WeightReport& r)
{
    return {{"metric", r.metric},
            {"weight", r.weight},
            {"slow_variation", to_json(r.slow_variation)},
            {"temperance", to_json(r.temperance)},
            {"samples_used", r.samples_used},
            {"pass", r.pass()}};
}

inline Json to_json(const EllipticityReport& r)
{
    Json locus = Json::array();
    for (const auto& p : r.locus) {
        locus.push_back(point_json(p));
    }
    return {{"K_radius", num(r.K_radius)},   {"C", num(r.C)},           {"margin", num(r.margin)},
            {"inverse_bound", num(r.inverse_bound)}, {"c0_prime", num(r.c0_prime)}, {"nodes", r.nodes},
            {"locus", locus},                {"pass", r.pass}};
}

inline Json to_json(const TruncationIndex& t)
{
    return {{"N_x", t.nx},
            {"dim_ker", t.dim_ker},
            {"dim_coker", t.dim_coker},
            {"index", t.index()},
            {"boundary_modes", t.boundary_modes},
            {"sigma_max", num(t.sigma_max)},
            {"tol", num(t.tol)},
            {"sigma_below", num(t.sigma_below)},
            {"sigma_gap", num(t.sigma_gap)},
            {"gap_ratio", num(t.gap_ratio)},
            {"gap_ok", t.gap_ok}};
}

inline Json to_json(const IndexReport& r)
{
    Json t = Json::array();
    for (const auto& x : r.truncations) {
        t.push_back(to_json(x));
    }
    return {{"dim_ker", r.dim_ker}, {"dim_coker", r.dim_coker}, {"index", r.index},   {"rank_tol", num(r.rank_tol)},
            {"truncations", t},     {"gap_stable", r.gap_stable}, {"stable", r.stable}};
}

inline Json to_json(const RieszProjector& b)
{
    return {{"radius", num(b.radius)},
            {"nodes", b.nodes},
            {"idempotence", num(b.idempotence)},
            {"self_adjointness", num(b.self_adjointness)},
            {"rank", b.rank},
            {"last_change", num(b.last_change)},
            {"kernel_angle", num(b.kernel_angle)}};
}

inline Json to_json(const SobolevReport& r)
{
    return {{"value", num(r.value)}, {"family", r.family}, {"weight", r.weight}, {"l2", num(r.l2)},
            {"ratio", num(r.ratio)}};
}

inline Json to_json(const CompactnessReport& r)
{
    Json t = Json::array();
    for (const auto& s : r.truncations) {
        t.push_back({{"N_x", s.nx},
                     {"sigma_k", num(s.sigma_k)},
                     {"k_star", s.k_star ? Json(*s.k_star) : Json(nullptr)},
                     {"monotone", s.monotone},
                     {"sigma_max", num(s.sigma.size() ? s.sigma(0) : 0.0)}});
    }
    return {{"k", r.k},
            {"truncations", t},
            {"sigma_k_spread", num(r.sigma_k_spread)},
            {"stable", r.stable},
            {"sigma_k_nonincreasing", r.sigma_k_nonincreasing}};
}

inline Json to_json(const ParametrixReport& r)
{
    Json shells = Json::array();
    for (const auto& s : r.shells) {
        shells.push_back(
            {{"R", num(s.R)}, {"residual", num(s.residual)}, {"weighted", num(s.weighted)}, {"nodes", s.nodes}});
    }
    return {{"K_radius", num(r.K_radius)},
            {"blend_width", num(r.blend_width)},
            {"eps", num(r.eps)},
            {"ellipticity", to_json(r.ellipticity)},
            {"shells", shells},
            {"sup_weighted", num(r.sup_weighted)},
            {"decay_exponent", num(r.decay_exponent)},
            {"decreasing", r.decreasing}};
}

inline Json to_json(const ConverseReport& r)
{
    Json j = {{"index", to_json(r.index)},
              {"gap_failure", r.gap_failure},
              {"ellipticity", to_json(r.ellipticity)},
              {"fredholm", r.fredholm},
              {"elliptic", r.elliptic},
              {"inconclusive", r.inconclusive},
              {"biconditional", r.biconditional ? Json(*r.biconditional) : Json(nullptr)}};
    if (r.projector) {
        j["projector"] = to_json(*r.projector);
        j["residual_away"] = num(r.residual_away);
        j["residual_near"] = num(r.residual_near);
    }
    return j;
}

inline Json to_json(const NeumannReport& r)
{
    Json tail = Json::array();
    for (double v : r.tail_bound) {
        tail.push_back(num(v));
    }
    Json powers = Json::array();
    for (double v : r.power_norm) {
        powers.push_back(num(v));
    }
    Json trace = Json::array();
    for (const auto& t : r.seminorm_trace) {
        trace.push_back({num(t[0]), num(t[1]), num(t[2])});
    }
    return {{"m_star", r.m_star},
            {"m_max", r.m_max},
            {"doubling", r.doubling},
            {"operator_contraction", num(r.operator_contraction)},
            {"tail_norm", tail},
            {"power_norm", powers},
            {"seminorm_trace", trace},
            {"fitted_ratio", {num(r.fitted_ratio[0]), num(r.fitted_ratio[1]), num(r.fitted_ratio[2])}},
            {"trace_metric", r.trace_metric},
            {"converged", r.converged}};
}

inline Json to_json(const InverseReport& r)
{
    return {{"C", num(r.C)},
            {"condition", num(r.condition)},
            {"residual_left", num(r.residual_left)},
            {"residual_right", num(r.residual_right)},
            {"neumann", to_json(r.neumann)}};
}

inline Json to_json(const RegularityReport& r)
{
    Json orders = Json::array();
    for (const auto& o : r.orders) {
        orders.push_back({{"order", o.order},
                          {"error_h", num(o.error_h)},
                          {"error_2h", num(o.error_2h)},
                          {"slope", num(o.slope)}});
    }
    return {{"h", num(r.h)}, {"orders", orders}};
}

inline Json to_json(const ChainDecayReport& r)
{
    Json centers = Json::array();
    for (const auto& c : r.centers) {
        centers.push_back(point_json(c));
    }
    return {{"nu", r.nu},
            {"centers", centers},
            {"lhs", num(r.lhs)},
            {"product_of_norms", num(r.product_of_norms)},
            {"rhs_model", num(r.rhs_model)},
            {"N0", num(r.N0)},
            {"log_C", num(r.log_C)},
            {"fit_quality", num(r.fit_quality)},
            {"fit_undefined", r.fit_undefined},
            {"samples", r.samples.size()}};
}

struct Check {
    std::string name;
    bool pass = false;
    Json detail;
};

struct ReportEnvelope {
    std::string command;
    Config config;
    Json body = Json::object();
    std::vector<Check> checks;
    Status status = Status::Pass;

    void check(const std::string& name, bool pass, Json detail = nullptr)
    {
        checks.push_back({name, pass, std::move(detail)});
        if (!pass && status == Status::Pass) {
            status = Status::Fail;
        }
    }

    /// Everything except the timestamp; stable across reruns.
    Json deterministic() const
    {
        Json summary = Json::array();
        for (const auto& c : checks) {
            Json e = {{"name", c.name}, {"pass", c.pass}};
            if (!c.detail.is_null()) {
                e["detail"] = c.detail;
            }
            summary.push_back(e);
        }
        return {{"tool", "psido-lab"},
                {"version", tool_version},
                {"config_hash", hex64(config_hash(config))},
                {"config", serialize(config)},
                {"command", command},
                {"status", to_string(status)},
                {"checks", summary},
                {"body", body}};
    }

    Json to_json() const
    {
        Json j = deterministic();
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        j["timestamp"] = buf;
        return j;
    }

    void write(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write report " + path.string());
        }
        out << to_json().dump(2) << '\n';
    }
};

} // namespace psido::io
