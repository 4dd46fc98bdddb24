// One line per acceptance criterion; exit status is the number of failures.

#include "psido/fredholm.hpp"
#include "psido/inversion/families.hpp"
#include "psido/inversion/regularity.hpp"
#include "psido/metric/axioms.hpp"
#include "psido/metric/geodesic.hpp"
#include "psido/quantize/chain_decay.hpp"
#include "psido/quantize/poly_symbol.hpp"
#include "psido/symbols/registry.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace psido;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = t < budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d %s  %-26s %s [%.2fs / %.0fs%s]\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(), t,
                budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SymbolBuilder builtin(const std::string& id)
{
    return [id](const PhaseGrid& g) { return symbols::sample(id, g); };
}

PolySymbol random_poly(std::mt19937_64& rng, int degree)
{
    std::uniform_int_distribution<int> coef(-3, 3);
    PolySymbol p;
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            p = p + PolySymbol::monomial(a, b, QComplex(Rational(coef(rng), 2), Rational(coef(rng), 3)));
        }
    }
    return p;
}

Outcome quantization_sanity()
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const CMatrix one = weyl_quantize(SymbolGrid::constant(grid, 1)).matrix();
    const double e_one = linalg::max_abs(one - CMatrix::Identity(256, 256));

    auto v = [](double x) { return 1.0 / (1.0 + x * x) + 0.2 * std::cos(x); };
    CMatrix want = CMatrix::Zero(256, 256);
    for (int j = 0; j < 256; ++j) {
        want(j, j) = v(grid.x(j));
    }
    const CMatrix got = weyl_quantize(SymbolGrid::sample([&](double x, double) { return cplx(v(x)); }, grid)).matrix();
    const double e_diag = linalg::max_abs(got - want);

    // Gaussians the grid resolves: xi standard deviation sqrt(s/2) of at least
    // 1.5 cells (dxi = 0.39 here); narrower ones are not representable.
    double e_rt = 0.0;
    for (const auto& [x0, xi0, s] : {std::tuple{0.0, 0.0, 1.0}, std::tuple{1.0, -2.0, 0.7}, std::tuple{-2.0, 3.0, 4.0}}) {
        const SymbolGrid g = SymbolGrid::sample(
            [=](double x, double xi) {
                return cplx(std::exp(-s * (x - x0) * (x - x0) - (xi - xi0) * (xi - xi0) / s));
            },
            grid);
        e_rt = std::max(e_rt, (dequantize(weyl_quantize(g)) - g).max_abs() / g.max_abs());
    }
    return {e_one <= 1e-10 && e_diag <= 1e-10 && e_rt <= 1e-6,
            "identity " + fmt("%.1e", e_one) + ", diagonal " + fmt("%.1e", e_diag) + ", round trip " + fmt("%.1e", e_rt)};
}

Outcome composition()
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 512);
    auto err = [&](const char* a, const char* b) {
        const PolySymbol pa = parse_poly(a);
        const PolySymbol pb = parse_poly(b);
        return core_distance(moyal(pa.sample(grid), pb.sample(grid)), moyal_poly(pa, pb).sample(grid));
    };
    const double e1 = err("x", "xi");
    const double e2 = err("x^2", "xi^2");
    const bool exact_oracles = moyal_poly(parse_poly("x"), parse_poly("xi")) == parse_poly("x*xi + i/2") &&
                               moyal_poly(parse_poly("x^2"), parse_poly("xi^2")) ==
                                   parse_poly("x^2*xi^2 + 2*i*x*xi - 1/2");
    std::mt19937_64 rng(6);
    bool assoc = true;
    for (int da = 0; da <= 4; ++da) {
        for (int db = 0; da + db <= 6 && db <= 4; ++db) {
            const int dc = std::min(2, 6 - da - db);
            const PolySymbol a = random_poly(rng, da);
            const PolySymbol b = random_poly(rng, db);
            const PolySymbol c = random_poly(rng, dc);
            assoc = assoc && moyal_poly(moyal_poly(a, b), c) == moyal_poly(a, moyal_poly(b, c));
        }
    }
    return {e1 <= 1e-6 && e2 <= 1e-6 && exact_oracles && assoc,
            "x#xi " + fmt("%.1e", e1) + ", x2#xi2 " + fmt("%.1e", e2) + ", associativity " + (assoc ? "exact" : "BROKEN")};
}

Outcome harmonic()
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 512);
    const CMatrix h = weyl_quantize(symbols::sample("harmonic", grid)).matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    double e = 0.0;
    for (int k = 0; k < 10; ++k) {
        e = std::max(e, std::abs(es.eigenvalues()(k) - (2.0 * k + 1.0)));
    }
    return {e <= 1e-6, "max |lambda_k - (2k+1)| " + fmt("%.1e", e)};
}

Outcome metric_geometry()
{
    const MetricField g = metrics::shubin();
    const double box = 0.7 * 8.0;
    const auto pairs = sample_pairs(g, SampleBox::cube(2, box), 500, 42);
    AxiomReport ax = check_axioms(g, pairs);
    ax.geodesic_temperance = check_geodesic_temperance(g, pairs, PhaseGrid(8.0, 8.0, 64, 64));
    const Point p = point2(3.0, 4.0);
    const double lam = planck(g, p);
    double sharp = 0.0;
    for (const auto& pr : pairs) {
        const QuadForm gx = g.at(pr.first);
        sharp = std::max(sharp, linalg::max_abs(geometric_mean(gx, symplectic_dual(gx)).matrix() -
                                                RealMatrix::Identity(2, 2)));
    }
    const QuadForm g34 = g.at(p);
    sharp = std::max(sharp, linalg::max_abs(geometric_mean(g34, symplectic_dual(g34)).matrix() -
                                            RealMatrix::Identity(2, 2)));
    return {ax.all_pass() && std::abs(lam - 26.0) <= 1e-9 && sharp <= 1e-10,
            std::string("axioms ") + (ax.all_pass() ? "pass" : "FAIL") + ", planck(3,4) " + fmt("%.12g", lam) +
                ", |g#g^s - I| " + fmt("%.1e", sharp)};
}

Outcome spectral_invariance()
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolGrid a = symbols::sample("bump-perturbation", grid);
    const SymbolInverse inv = symbol_inverse_full(a);
    const SymbolGrid direct = dequantize(inv.op.like(weyl_quantize(a).matrix().inverse()));
    const double oracle = core_distance(inv.symbol, direct);
    const auto& r = inv.report;
    bool geometric = true;
    for (double q : r.neumann.fitted_ratio) {
        geometric = geometric && q < 1.0;
    }
    return {r.residual_left <= 1e-5 && r.residual_right <= 1e-5 && oracle <= 1e-5 && geometric,
            "residuals " + fmt("%.1e", r.residual_left) + "/" + fmt("%.1e", r.residual_right) + ", direct " +
                fmt("%.1e", oracle) + ", ratios " + fmt("%.2f", r.neumann.fitted_ratio[0]) + "," +
                fmt("%.2f", r.neumann.fitted_ratio[1]) + "," + fmt("%.2f", r.neumann.fitted_ratio[2])};
}

Outcome regularity()
{
    const double h = 1.0 / 64.0;
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolFamily fam = families::sample(families::by_name("gauss-ramp:0.3"), grid, 0.5 - 2 * h, h, 5);
    const RegularityReport rep = regularity_check(fam, family_inverse(fam), 1);
    const RegularityOrder& o = rep.orders.front();
    return {o.error_h <= 1e-4 && o.slope >= 1.9,
            "error(h=1/64) " + fmt("%.1e", o.error_h) + ", slope " + fmt("%.3f", o.slope)};
}

Outcome index_invariance()
{
    const MetricField g = metrics::shubin();
    const std::vector<int> truncations{128, 256, 512};
    std::ostringstream seen;
    bool ok = true;
    int runs = 0;
    for (const Weight& m1 : {weights::one(), weights::bracket(1.0), weights::bracket(2.0)}) {
        const IndexScan s = fredholm_scan(builtin("annihilation"), weights::bracket(1.0), m1, g, 8.0, truncations);
        for (const auto& t : s.report.truncations) {
            ok = ok && t.gap_ok && t.index() == 1;
            seen << (runs++ ? "," : "") << t.index();
        }
        ok = ok && s.report.stable && s.report.index == 1;
    }
    const IndexScan c = fredholm_scan(builtin("creation"), weights::bracket(1.0), weights::one(), g, 8.0, truncations);
    ok = ok && c.report.stable && c.report.index == -1;
    return {ok && runs == 9, "annihilation [" + seen.str() + "], creation " + std::to_string(c.report.index)};
}

Outcome riesz()
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const RieszProjector b = riesz_projector(weyl_quantize(symbols::sample("annihilation", grid)), 1.0);
    return {b.idempotence <= 1e-8 && b.self_adjointness <= 1e-8 && b.rank == 1 && b.kernel_angle <= 1e-6,
            "|B^2-B| " + fmt("%.1e", b.idempotence) + ", |B-B*| " + fmt("%.1e", b.self_adjointness) + ", rank " +
                std::to_string(b.rank) + ", angle " + fmt("%.1e", b.kernel_angle)};
}

Outcome compactness()
{
    const std::vector<int> sizes{128, 256, 512};
    const CompactnessReport inv = compactness_probe(builtin("vanishing"), 8.0, sizes);
    double worst = 0.0;
    bool monotone = true;
    for (const auto& t : inv.truncations) {
        worst = std::max(worst, t.sigma_k);
        monotone = monotone && t.monotone;
    }
    const CompactnessReport one =
        compactness_probe([](const PhaseGrid& g) { return SymbolGrid::constant(g, 1); }, 8.0, {128, 256});
    double e_one = 0.0;
    for (const auto& t : one.truncations) {
        e_one = std::max(e_one, (t.sigma.array() - 1.0).abs().maxCoeff());
    }
    return {worst < 1e-2 && inv.stable && monotone && e_one <= 1e-10,
            "sigma_50 max " + fmt("%.3g", worst) + " (spread " + fmt("%.2g", inv.sigma_k_spread) + "), monotone " +
                (monotone ? "yes" : "no") + ", |sigma(1)-1| " + fmt("%.1e", e_one)};
}

Outcome converse()
{
    const MetricField g = metrics::shubin();
    const std::vector<int> truncations{128, 256, 512};
    ConverseOptions opts;
    const ConverseReport bad = converse_experiment(builtin("normalized-degenerate"), g, 8.0, truncations, opts);
    const ConverseReport good = converse_experiment(builtin("normalized-annihilation"), g, 8.0, truncations, opts);
    bool no_gap = !bad.index.gap_stable && !bad.fredholm && !bad.elliptic;
    return {no_gap && good.fredholm && good.elliptic && good.index.stable && good.index.index == 1,
            std::string("x/<X>: ") + (bad.inconclusive ? "no stable gap (exit 3)" : "GAP FOUND") +
                ", (x+i xi)/<X>: index " + std::to_string(good.index.index) + (good.index.stable ? " stable" : " unstable")};
}

Outcome sobolev()
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SobolevNorm norm(weights::one(), partition_of_unity(grid, metrics::shubin(), 0.5));
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> freq(-6.0, 6.0);
    std::uniform_real_distribution<double> wid(0.5, 1.5);
    double C = 1.0;
    for (int i = 0; i < 50; ++i) {
        const double x0 = pos(rng);
        const double w = freq(rng);
        const double s = wid(rng);
        CVector u(grid.nx());
        for (int j = 0; j < grid.nx(); ++j) {
            const double x = grid.x(j) - x0;
            u(j) = std::exp(-x * x / (2 * s * s)) * std::exp(I * w * grid.x(j));
        }
        const double ratio = norm(u).ratio;
        C = std::max({C, ratio, 1.0 / ratio});
    }
    return {C <= 10.0, "C = " + fmt("%.3f", C)};
}

Outcome chain_decay()
{
    const PhaseGrid grid = PhaseGrid::fourier(16.0, 256);
    std::ostringstream s;
    bool ok = true;
    for (int nu = 2; nu <= 4; ++nu) {
        std::vector<Point> centers;
        for (int j = 0; j <= nu; ++j) {
            centers.push_back(point2(-6.0 + 12.0 * j / nu, 0.0));
        }
        const ChainDecayReport r = confined_chain_decay(centers, metrics::euclidean(), 1.0, grid);
        ok = ok && !r.fit_undefined && r.N0 > 0.0 && r.fit_quality <= 0.5;
        s << (nu > 2 ? ", " : "") << "nu=" << nu << " N0 " << fmt("%.2f", r.N0) << " fit " << fmt("%.2g", r.fit_quality);
    }
    return {ok, s.str()};
}

} // namespace

int main()
{
    criterion(1, "quantization sanity", 1, quantization_sanity);
    criterion(2, "composition morphism", 10, composition);
    criterion(3, "harmonic oscillator", 30, harmonic);
    criterion(4, "metric geometry", 5, metric_geometry);
    criterion(5, "spectral invariance", 60, spectral_invariance);
    criterion(6, "C^N regularity", 120, regularity);
    criterion(7, "index invariance", 180, index_invariance);
    criterion(8, "Riesz projector", 30, riesz);
    criterion(9, "compactness", 30, compactness);
    criterion(10, "converse evidence", 120, converse);
    criterion(11, "Sobolev equivalence", 60, sobolev);
    criterion(12, "chain decay", 60, chain_decay);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
