#include "psido/cli/commands.hpp"

#include "psido/fredholm.hpp"
#include "psido/inversion/families.hpp"
#include "psido/io/container.hpp"
#include "psido/io/output.hpp"
#include "psido/io/report.hpp"
#include "psido/metric/geodesic.hpp"
#include "psido/quantize/poly_symbol.hpp"
#include "psido/symbols/registry.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>

namespace psido::cli {

namespace fs = std::filesystem;
using io::Json;
using io::ReportEnvelope;
using io::Status;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<int> grid;
    std::optional<std::string> metric;
    std::optional<std::uint64_t> seed;
    bool fast_delta = false;

    std::string symbol;
    std::string symbol_b;
    std::string weight;
    std::string weight1;
    std::vector<int> truncations{128, 256, 512};
    int pairs = 500;
    double box = 0.0;
    bool no_geodesic = false;
    double radius = 1.0;
    double K = 1.0;
    double bound = 10.0;
    int functions = 50;
    double r = 0.5;
    std::string manifest;
    std::string family = "gauss-ramp";
    double lambda_min = 0.0;
    double lambda_max = 1.0;
    double step = 0.25;
    int order = 1;
    double h = 1.0 / 64.0;
    double center = 0.5;
    std::string topic;
};

struct Ctx {
    io::Config cfg;
    fs::path out;
    Options o;

    PhaseGrid grid() const { return PhaseGrid::fourier(cfg.L_x, cfg.N_x); }
    MetricField metric() const { return metrics::by_name(cfg.metric); }
    Weight weight() const { return weights::by_name(o.weight.empty() ? cfg.weight : o.weight); }
    Weight weight1() const { return weights::by_name(o.weight1.empty() ? cfg.weight1 : o.weight1); }
};

bool is_builtin(const std::string& id)
{
    try {
        symbols::by_name(id);
        return true;
    } catch (const Error&) {
        return false;
    }
}

/// Built-in id, or else a polynomial expression in x and xi.
SymbolBuilder symbol_builder(const std::string& text)
{
    if (text.empty()) {
        throw Error(ErrorKind::Usage, "a symbol id or polynomial expression is required");
    }
    if (is_builtin(text)) {
        const symbols::BuiltinSymbol s = symbols::by_name(text);
        return [s](const PhaseGrid& g) { return s.sample(g); };
    }
    PolySymbol p;
    try {
        p = parse_poly(text);
    } catch (const Error& e) {
        throw Error(ErrorKind::UnknownId, "'" + text + "' is neither a built-in symbol nor a polynomial (" + e.what() + ")");
    }
    return [p](const PhaseGrid& g) { return p.sample(g); };
}

std::optional<PolySymbol> as_poly(const std::string& text)
{
    if (is_builtin(text)) {
        return std::nullopt;
    }
    return parse_poly(text);
}

void sigma_csv(const fs::path& path, const std::vector<TruncationIndex>& ts)
{
    io::CsvWriter csv(path, {"truncation", "k", "sigma"});
    for (const auto& t : ts) {
        for (Eigen::Index k = 0; k < t.sigma.size(); ++k) {
            csv.row(t.nx, k + 1, t.sigma(k));
        }
    }
}

// --- metric-check -----------------------------------------------------------

void metric_check(Ctx& c, ReportEnvelope& env)
{
    const MetricField g = c.metric();
    const Weight m = c.weight();
    const double box = c.o.box > 0.0 ? c.o.box : 0.7 * std::min(c.cfg.L_x, c.cfg.L_xi);
    const auto pairs = sample_pairs(g, SampleBox::cube(g.dim(), box), c.o.pairs, c.cfg.seed);
    AxiomReport ax = check_axioms(g, pairs);
    if (!c.o.no_geodesic) {
        const PhaseGrid lattice(box / 0.7, box / 0.7, 64, 64);
        ax.geodesic_temperance = check_geodesic_temperance(g, pairs, lattice);
    }
    const WeightReport wr = check_weight(g, m, pairs);
    const Point probe = point2(3.0, 4.0);
    env.body["box_half_width"] = io::num(box);
    env.body["axioms"] = io::to_json(ax);
    env.body["weight"] = io::to_json(wr);
    env.body["probe"] = {{"point", io::point_json(probe)},
                         {"planck", io::num(planck(g, probe))},
                         {"sharp_minus_identity", io::num((g.sharp_at(probe).matrix() -
                                                           RealMatrix::Identity(g.dim(), g.dim()))
                                                              .cwiseAbs()
                                                              .maxCoeff())}};
    env.check("slow_variation", ax.slow_variation.pass);
    env.check("temperance", ax.temperance.pass);
    env.check("uncertainty", ax.uncertainty);
    if (ax.geodesic_temperance) {
        env.check("geodesic_temperance", ax.geodesic_temperance->pass);
    }
    env.check("weight_admissible", wr.pass());
}

// --- quantize / moyal -------------------------------------------------------

void quantize_cmd(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = c.grid();
    const SymbolGrid a = symbol_builder(c.o.symbol)(grid);
    const OperatorMatrix op = weyl_quantize(a);
    const SymbolGrid back = dequantize(op);
    const double scale = std::max(a.max_abs(), 1e-300);
    const double round_trip = (back - a).max_abs() / scale;
    env.body["symbol"] = c.o.symbol;
    env.body["grid"] = io::grid_json(grid);
    env.body["round_trip_relative"] = io::num(round_trip);
    env.body["hermitian_residual"] = io::num(op.hermitian_residual());
    env.body["boundary_mass_fraction"] = io::num(boundary_mass_fraction(a));
    env.body["aliasing_warning"] = op.aliasing_warning;
    io::write_container((c.out / "quantize.bin").string(), io::to_container(op));
    env.body["container"] = "quantize.bin";
    env.check("round_trip", round_trip <= 1e-6, io::num(round_trip));
}

void moyal_cmd(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = c.grid();
    const SymbolGrid a = symbol_builder(c.o.symbol)(grid);
    const SymbolGrid b = symbol_builder(c.o.symbol_b)(grid);
    const MoyalResult ab = moyal_with_flags(a, b);
    env.body["a"] = c.o.symbol;
    env.body["b"] = c.o.symbol_b;
    env.body["grid"] = io::grid_json(grid);
    env.body["windowed"] = ab.windowed;
    env.body["aliasing_warning"] = ab.aliasing_warning;
    io::write_container((c.out / "moyal.bin").string(), io::to_container(ab.symbol));
    env.body["container"] = "moyal.bin";
    const auto pa = as_poly(c.o.symbol);
    const auto pb = as_poly(c.o.symbol_b);
    if (pa && pb) {
        const PolySymbol exact = moyal_poly(*pa, *pb);
        const double err = core_distance(ab.symbol, exact.sample(grid));
        env.body["exact"] = exact.to_string();
        env.body["oracle_error"] = io::num(err);
        env.check("matches_exact_oracle", err <= c.cfg.residual_tol, io::num(err));
    } else {
        // no oracle: only finiteness is checked
        env.check("finite", ab.symbol.max_abs() < std::numeric_limits<double>::infinity());
    }
}

// --- fredholm ---------------------------------------------------------------

IndexOptions index_options(const Ctx& c)
{
    IndexOptions o;
    o.rank_tol = c.cfg.rank_tol;
    return o;
}

void index_cmd(Ctx& c, ReportEnvelope& env)
{
    const SymbolBuilder a = symbol_builder(c.o.symbol);
    const Weight m = c.weight();
    const Weight m1 = c.weight1();
    const IndexScan scan =
        fredholm_scan(a, m, m1, c.metric(), c.cfg.L_x, c.o.truncations, index_options(c));
    env.body["symbol"] = c.o.symbol;
    env.body["M"] = m.label();
    env.body["M1"] = m1.label();
    env.body["index"] = io::to_json(scan.report);
    sigma_csv(c.out / "index-sigma.csv", scan.report.truncations);
    if (!scan.report.gap_stable) {
        env.body["gap_failure"] = scan.gap_failure;
        env.status = Status::Inconclusive;
        return;
    }
    env.check("index_stable", scan.report.stable, scan.report.index);
}

void riesz_cmd(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = c.grid();
    const OperatorMatrix A = weyl_quantize(symbol_builder(c.o.symbol)(grid));
    const RieszProjector b = riesz_projector(A, c.o.radius);
    env.body["symbol"] = c.o.symbol;
    env.body["grid"] = io::grid_json(grid);
    env.body["projector"] = io::to_json(b);
    io::write_container((c.out / "riesz.bin").string(), io::to_container(A.like(b.B)));
    env.body["container"] = "riesz.bin";
    env.check("idempotent", b.idempotence <= 1e-8, io::num(b.idempotence));
    env.check("self_adjoint", b.self_adjointness <= 1e-8, io::num(b.self_adjointness));
    env.check("range_is_kernel", b.kernel_angle <= 1e-6, io::num(b.kernel_angle));
}

void parametrix_cmd(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = c.grid();
    const Parametrix p = parametrix(symbol_builder(c.o.symbol)(grid), c.weight(), c.metric(), c.o.K);
    env.body["symbol"] = c.o.symbol;
    env.body["grid"] = io::grid_json(grid);
    env.body["parametrix"] = io::to_json(p.report);
    io::write_container((c.out / "parametrix.bin").string(), io::to_container(p.symbol));
    env.body["container"] = "parametrix.bin";
    env.check("weighted_residual_bounded", p.report.sup_weighted <= c.o.bound, io::num(p.report.sup_weighted));
    env.check("residual_decreasing", p.report.decreasing, io::num(p.report.decay_exponent));
}

void converse_cmd(Ctx& c, ReportEnvelope& env)
{
    ConverseOptions opts;
    if (c.cfg.rank_tol != io::Config{}.rank_tol) {
        opts.index.rank_tol = c.cfg.rank_tol;
    }
    const ConverseReport rep = converse_experiment(symbol_builder(c.o.symbol), c.metric(), c.cfg.L_x,
                                                   c.o.truncations, opts);
    env.body["symbol"] = c.o.symbol;
    env.body["converse"] = io::to_json(rep);
    sigma_csv(c.out / "converse-sigma.csv", rep.index.truncations);
    if (rep.inconclusive) {
        env.status = Status::Inconclusive;
        return;
    }
    env.check("fredholm_iff_elliptic", *rep.biconditional);
}

std::vector<CVector> test_functions(const PhaseGrid& grid, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-0.375 * grid.lx(), 0.375 * grid.lx());
    std::uniform_real_distribution<double> freq(-6.0, 6.0);
    std::uniform_real_distribution<double> wid(0.5, 1.5);
    std::vector<CVector> out;
    for (int i = 0; i < count; ++i) {
        const double x0 = pos(rng);
        const double w = freq(rng);
        const double s = wid(rng);
        CVector u(grid.nx());
        for (int j = 0; j < grid.nx(); ++j) {
            const double x = grid.x(j) - x0;
            u(j) = std::exp(-x * x / (2.0 * s * s)) * std::exp(I * w * grid.x(j));
        }
        out.push_back(u / std::sqrt(u.squaredNorm() * grid.dx()));
    }
    return out;
}

void sobolev_cmd(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = c.grid();
    const Weight m = c.weight();
    const ConfinedFamily fam = partition_of_unity(grid, c.metric(), c.o.r);
    const SobolevNorm norm(m, fam);
    double C = 1.0;
    bool finite = true;
    Json values = Json::array();
    for (const CVector& u : test_functions(grid, c.o.functions, c.cfg.seed)) {
        const SobolevReport r = norm(u);
        values.push_back(io::num(r.ratio));
        finite = finite && std::isfinite(r.value);
        C = std::max({C, r.ratio, r.ratio > 0.0 ? 1.0 / r.ratio : 0.0});
    }
    env.body["weight"] = m.label();
    env.body["family"] = {{"metric", fam.metric().label()}, {"r", io::num(fam.r())}, {"centers", fam.size()}};
    env.body["grid"] = io::grid_json(grid);
    env.body["ratios"] = values;
    env.body["equivalence_constant"] = io::num(C);
    env.body["grid_bound"] = io::num(norm.equivalence_bound());
    env.check("finite", finite);
    if (m.label() == "one") {
        env.check("l2_equivalence", C <= 10.0, io::num(C));
    }
}

// --- inversion --------------------------------------------------------------

void invert_cmd(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = c.grid();
    const SymbolInverse inv = symbol_inverse_full(symbol_builder(c.o.symbol)(grid));
    const SymbolGrid direct = dequantize(inv.op.like(weyl_quantize(symbol_builder(c.o.symbol)(grid)).matrix().inverse()));
    const double oracle = core_distance(inv.symbol, direct);
    env.body["symbol"] = c.o.symbol;
    env.body["grid"] = io::grid_json(grid);
    env.body["inverse"] = io::to_json(inv.report);
    env.body["direct_inverse_error"] = io::num(oracle);
    io::write_container((c.out / "invert.bin").string(), io::to_container(inv.symbol));
    env.body["container"] = "invert.bin";
    io::CsvWriter csv(c.out / "invert-trace.csv", {"m", "tail_norm", "power_norm", "seminorm_k0", "seminorm_k1",
                                                   "seminorm_k2"});
    const NeumannReport& n = inv.report.neumann;
    for (std::size_t m = 0; m < n.seminorm_trace.size(); ++m) {
        csv.row(m + 1, m + 1 < n.tail_bound.size() ? n.tail_bound[m + 1] : 0.0, n.power_norm[m], n.seminorm_trace[m][0],
                n.seminorm_trace[m][1], n.seminorm_trace[m][2]);
    }
    const double tol = c.cfg.residual_tol;
    env.check("left_residual", inv.report.residual_left <= tol, io::num(inv.report.residual_left));
    env.check("right_residual", inv.report.residual_right <= tol, io::num(inv.report.residual_right));
    env.check("matches_direct_inverse", oracle <= tol, io::num(oracle));
    env.check("neumann_converged", n.converged);
}

struct FamilyRange {
    std::string id;
    double lambda_min = 0.0;
    double lambda_max = 1.0;
    double step = 0.25;
};

FamilyRange family_range(const Ctx& c)
{
    FamilyRange s{c.o.family, c.o.lambda_min, c.o.lambda_max, c.o.step};
    if (c.o.manifest.empty()) {
        return s;
    }
    std::ifstream in(c.o.manifest);
    if (!in) {
        throw Error(ErrorKind::Config, "cannot read family manifest " + c.o.manifest);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        for (const auto& [key, value] : j.items()) {
            if (key != "family" && key != "lambda") {
                throw Error(ErrorKind::Config, "unknown manifest key '" + key + "'");
            }
        }
        s.id = j.at("family").get<std::string>();
        const auto& l = j.at("lambda");
        s.lambda_min = l.at("min").get<double>();
        s.lambda_max = l.at("max").get<double>();
        s.step = l.at("step").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, "bad family manifest " + c.o.manifest + ": " + e.what());
    }
    return s;
}

void invert_family_cmd(Ctx& c, ReportEnvelope& env)
{
    const FamilyRange range = family_range(c);
    if (!(range.step > 0.0) || !(range.lambda_max >= range.lambda_min)) {
        throw Error(ErrorKind::Config, "family range needs step > 0 and max >= min");
    }
    const int count = static_cast<int>(std::floor((range.lambda_max - range.lambda_min) / range.step + 1e-9)) + 1;
    const PhaseGrid grid = c.grid();
    const SymbolFamily fam = families::sample(families::by_name(range.id), grid, range.lambda_min, range.step, count);
    const FamilyInverse inv = family_inverse_full(fam);
    Json members = Json::array();
    io::CsvWriter csv(c.out / "invert-family.csv", {"lambda", "residual", "continuity_ratio"});
    double worst = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const double ratio = i < inv.report.continuity_ratio.size() ? inv.report.continuity_ratio[i] : 0.0;
        members.push_back({{"lambda", io::num(fam.lambda(i))},
                           {"residual", io::num(inv.report.residual[i])},
                           {"continuity_ratio", io::num(ratio)},
                           {"neumann_converged", inv.report.members[i].neumann.converged}});
        csv.row(fam.lambda(i), inv.report.residual[i], ratio);
        worst = std::max(worst, inv.report.residual[i]);
    }
    env.body["family"] = range.id;
    env.body["lambda"] = {{"min", io::num(range.lambda_min)}, {"max", io::num(range.lambda_max)},
                          {"step", io::num(range.step)}};
    env.body["grid"] = io::grid_json(grid);
    env.body["members"] = members;
    env.check("residuals", worst <= c.cfg.residual_tol, io::num(worst));
}

void regularity_cmd(Ctx& c, ReportEnvelope& env)
{
    if (c.o.order < 1 || c.o.order > 3) {
        throw Error(ErrorKind::Usage, "--order must be 1, 2 or 3");
    }
    const int count = 2 * c.o.order + 3;
    const double lambda0 = c.o.center - (c.o.order + 1) * c.o.h;
    const PhaseGrid grid = c.grid();
    const SymbolFamily fam = families::sample(families::by_name(c.o.family), grid, lambda0, c.o.h, count);
    const RegularityReport rep = regularity_check(fam, family_inverse(fam), c.o.order);
    env.body["family"] = c.o.family;
    env.body["center"] = io::num(c.o.center);
    env.body["grid"] = io::grid_json(grid);
    env.body["regularity"] = io::to_json(rep);
    for (const auto& o : rep.orders) {
        const bool exact = o.error_h <= 1e-12;
        env.check("slope_order_" + std::to_string(o.order), exact || o.slope >= 1.9, io::num(o.slope));
    }
    env.check("order_1_error", rep.orders.front().error_h <= 1e-4, io::num(rep.orders.front().error_h));
}

// --- demos ------------------------------------------------------------------

void demo_composition(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = PhaseGrid::fourier(c.cfg.L_x, 512);
    env.body["grid"] = io::grid_json(grid);
    Json cases = Json::array();
    for (const auto& [a, b] : {std::pair{"x", "xi"}, std::pair{"x^2", "xi^2"}}) {
        const PolySymbol pa = parse_poly(a);
        const PolySymbol pb = parse_poly(b);
        const double err = core_distance(moyal(pa.sample(grid), pb.sample(grid)), moyal_poly(pa, pb).sample(grid));
        cases.push_back({{"a", a}, {"b", b}, {"exact", moyal_poly(pa, pb).to_string()}, {"error", io::num(err)}});
        env.check(std::string(a) + " # " + b, err <= 1e-6, io::num(err));
    }
    // e^{-s|X|^2} # e^{-t|X|^2} = (1 + st)^{-1} e^{-(s+t)/(1+st) |X|^2}
    for (const auto& [s, t] : {std::pair{1.0, 1.0}, std::pair{1.0, 0.5}}) {
        auto gauss = [&](double k, double amp) {
            return SymbolGrid::sample([=](double x, double xi) { return cplx(amp * std::exp(-k * (x * x + xi * xi))); },
                                      grid);
        };
        const double err = core_distance(moyal(gauss(s, 1.0), gauss(t, 1.0)), gauss((s + t) / (1 + s * t), 1.0 / (1 + s * t)));
        const std::string name = "gauss(" + io::Json(s).dump() + ") # gauss(" + io::Json(t).dump() + ")";
        cases.push_back({{"case", name}, {"error", io::num(err)}});
        env.check(name, err <= 1e-6, io::num(err));
    }
    env.body["cases"] = cases;
}

void demo_index_invariance(Ctx& c, ReportEnvelope& env)
{
    const MetricField g = metrics::shubin();
    Json runs = Json::array();
    for (const Weight& m1 : {weights::one(), weights::bracket(1.0), weights::bracket(2.0)}) {
        const IndexScan scan = fredholm_scan(symbol_builder("annihilation"), weights::bracket(1.0), m1, g, c.cfg.L_x,
                                             c.o.truncations, index_options(c));
        runs.push_back({{"M1", m1.label()}, {"index", io::to_json(scan.report)}});
        env.check("index(M1 = " + m1.label() + ") = +1", scan.report.stable && scan.report.index == 1,
                  scan.report.index);
    }
    env.body["symbol"] = "annihilation";
    env.body["M"] = "bracket";
    env.body["runs"] = runs;
}

void demo_chain_decay(Ctx& c, ReportEnvelope& env)
{
    const PhaseGrid grid = PhaseGrid::fourier(16.0, 256);
    const MetricField e = metrics::euclidean();
    DeltaOptions delta;
    delta.mode = c.cfg.fast_delta ? DeltaMode::Fast : DeltaMode::Exact;
    Json chains = Json::array();
    for (int nu = 2; nu <= 4; ++nu) {
        std::vector<Point> centers;
        for (int j = 0; j <= nu; ++j) {
            centers.push_back(point2(-6.0 + 12.0 * j / nu, 0.0));
        }
        const ChainDecayReport rep = confined_chain_decay(centers, e, 1.0, grid, delta);
        chains.push_back(io::to_json(rep));
        env.check("nu = " + std::to_string(nu), !rep.fit_undefined && rep.N0 > 0.0 && rep.fit_quality <= 0.5,
                  {{"N0", io::num(rep.N0)}, {"fit_quality", io::num(rep.fit_quality)}});
    }
    env.body["grid"] = io::grid_json(grid);
    env.body["chains"] = chains;
}

// --- driver -----------------------------------------------------------------

int error_exit(const Error& e)
{
    switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Usage:
    case ErrorKind::UnknownId:
    case ErrorKind::Io: return 1;
    default: return 2;
    }
}

} // namespace

int run_command(const std::vector<std::string>& args)
{
    CLI::App app{"psido-lab: Weyl-Hormander calculus experiments", "psido-lab"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config_path, "JSON config file");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--grid", o.grid, "N_x (power of two, 64..2048)");
    app.add_option("--metric", o.metric, "metric id");
    app.add_option("--seed", o.seed, "random seed");
    app.add_flag("--fast-delta", o.fast_delta, "approximate delta_r");

    std::string command;
    auto sub = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->callback([&command, name] { command = name; });
        return s;
    };
    CLI::App* mc = sub("metric-check", "sample the metric axioms, geodesic temperance and weight admissibility");
    mc->add_option("--weight", o.weight, "weight id (default: config)");
    mc->add_option("--pairs", o.pairs, "sample pairs")->check(CLI::PositiveNumber);
    mc->add_option("--box", o.box, "sampling box half-width")->check(CLI::PositiveNumber);
    mc->add_flag("--no-geodesic", o.no_geodesic, "skip geodesic temperance");

    CLI::App* qz = sub("quantize", "Weyl-quantize a symbol and check the round trip");
    CLI::App* my = sub("moyal", "grid # product, compared to the exact polynomial product when possible");
    my->add_option("--a", o.symbol, "left factor")->required();
    my->add_option("--b", o.symbol_b, "right factor")->required();

    CLI::App* ix = sub("index", "numerical Fredholm index across truncations");
    CLI::App* rz = sub("riesz", "Riesz projector onto the kernel");
    rz->add_option("--radius", o.radius, "contour radius in (0, 1]");
    CLI::App* px = sub("parametrix", "parametrix and residual decay");
    px->add_option("--K", o.K, "radius of the modified region")->check(CLI::NonNegativeNumber);
    px->add_option("--bound", o.bound, "bound for residual * lambda_g");
    CLI::App* cv = sub("converse", "Fredholm versus elliptic for one symbol");
    CLI::App* sb = sub("sobolev", "H(M,g) norm against L^2 on random wave packets");
    sb->add_option("--functions", o.functions, "number of test functions")->check(CLI::PositiveNumber);
    sb->add_option("--r", o.r, "partition radius")->check(CLI::PositiveNumber);
    for (CLI::App* s : {ix, px, sb}) {
        s->add_option("--weight", o.weight, "weight M (default: config)");
    }
    ix->add_option("--weight1", o.weight1, "weight M1 (default: config)");
    for (CLI::App* s : {ix, cv}) {
        s->add_option("--truncations", o.truncations, "N_x values")->delimiter(',')->check(CLI::PositiveNumber);
    }

    CLI::App* iv = sub("invert", "two-sided # inverse through the Neumann series");
    CLI::App* ifam = sub("invert-family", "memberwise inverse of a parameter family");
    ifam->add_option("--manifest", o.manifest, "JSON manifest {family, lambda: {min, max, step}}");
    ifam->add_option("--family", o.family, "family id");
    ifam->add_option("--lambda-min", o.lambda_min);
    ifam->add_option("--lambda-max", o.lambda_max);
    ifam->add_option("--step", o.step);
    CLI::App* rg = sub("regularity", "lambda-derivatives of the inverse family against the derivative identity");
    rg->add_option("--family", o.family, "family id");
    rg->add_option("--order", o.order, "highest derivative order (1..3)");
    rg->set_help_flag("--help", "print this help message and exit");
    rg->add_option("--h", o.h, "lambda step")->check(CLI::PositiveNumber);
    rg->add_option("--center", o.center, "lambda at the middle of the stencil");

    CLI::App* dm = sub("demo", "preset experiments");
    dm->add_option("topic", o.topic, "composition | index-invariance | chain-decay")
        ->required()
        ->check(CLI::IsMember({"composition", "index-invariance", "chain-decay"}));
    dm->add_option("--truncations", o.truncations, "N_x values")->delimiter(',')->check(CLI::PositiveNumber);

    // symbol defaults differ per command; applied before parsing
    for (auto [s, d] : {std::pair{qz, "gauss"}, std::pair{ix, "annihilation"}, std::pair{rz, "annihilation"},
                        std::pair{px, "annihilation"}, std::pair{cv, "normalized-annihilation"},
                        std::pair{iv, "bump-perturbation"}}) {
        s->add_option("--symbol", o.symbol, "built-in symbol id or polynomial in x, xi")->default_str(d);
        s->preparse_callback([&o, d = std::string(d)](std::size_t) { o.symbol = d; });
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    Ctx ctx;
    ctx.o = o;
    try {
        if (!o.config_path.empty()) {
            ctx.cfg = io::load_config(o.config_path);
        }
        if (o.out) ctx.cfg.output_dir = *o.out;
        if (o.grid) ctx.cfg.N_x = *o.grid;
        if (o.metric) ctx.cfg.metric = *o.metric;
        if (o.seed) ctx.cfg.seed = *o.seed;
        if (o.fast_delta) ctx.cfg.fast_delta = true;
        io::validate(ctx.cfg);
        metrics::by_name(ctx.cfg.metric);
        weights::by_name(ctx.cfg.weight);
        weights::by_name(ctx.cfg.weight1);
        for (int t : o.truncations) {
            if (!is_power_of_two(t) || t < 8) {
                throw Error(ErrorKind::Usage, "truncation sizes must be powers of two >= 8");
            }
        }
    } catch (const Error& e) {
        std::cerr << "psido-lab: " << e.what() << '\n';
        return 1;
    }

    std::string name = command;
    if (command == "demo") {
        name += "-" + o.topic;
    }
    ctx.out = ctx.cfg.output_dir;
    ReportEnvelope env;
    env.command = name;
    env.config = ctx.cfg;
    try {
        io::DirectoryLock lock(ctx.out);
        try {
            if (command == "metric-check") metric_check(ctx, env);
            else if (command == "quantize") quantize_cmd(ctx, env);
            else if (command == "moyal") moyal_cmd(ctx, env);
            else if (command == "index") index_cmd(ctx, env);
            else if (command == "riesz") riesz_cmd(ctx, env);
            else if (command == "parametrix") parametrix_cmd(ctx, env);
            else if (command == "converse") converse_cmd(ctx, env);
            else if (command == "sobolev") sobolev_cmd(ctx, env);
            else if (command == "invert") invert_cmd(ctx, env);
            else if (command == "invert-family") invert_family_cmd(ctx, env);
            else if (command == "regularity") regularity_cmd(ctx, env);
            else if (o.topic == "composition") demo_composition(ctx, env);
            else if (o.topic == "index-invariance") demo_index_invariance(ctx, env);
            else demo_chain_decay(ctx, env);
        } catch (const Error& e) {
            const int code = error_exit(e);
            if (code == 1) {
                throw;
            }
            env.body["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
            env.status = e.kind() == ErrorKind::NoSpectralGap ? Status::Inconclusive : Status::Fail;
        }
        env.write(ctx.out / (name + ".json"));
    } catch (const Error& e) {
        std::cerr << "psido-lab: " << e.what() << '\n';
        return error_exit(e);
    }
    std::cout << name << ": " << io::to_string(env.status) << " (" << (ctx.out / (name + ".json")).string() << ")\n";
    for (const auto& ch : env.checks) {
        std::cout << "  " << (ch.pass ? "ok  " : "FAIL") << ' ' << ch.name;
        if (!ch.detail.is_null()) {
            std::cout << " = " << ch.detail.dump();
        }
        std::cout << '\n';
    }
    return io::exit_code(env.status);
}

int run_command(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_command(args);
}

} // namespace psido::cli
