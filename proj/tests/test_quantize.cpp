#include "psido/quantize/chain_decay.hpp"
#include "psido/quantize/moyal.hpp"
#include "psido/quantize/op_seminorm.hpp"
#include "psido/symbols/registry.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace psido;

namespace {


SymbolGrid poly_on(const char* text, const PhaseGrid& grid) { return parse_poly(text).sample(grid); }

PolySymbol random_poly(std::mt19937_64& rng, int degree)
{
    std::uniform_int_distribution<int> coef(-3, 3);
    PolySymbol p;
    for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
            const int re = coef(rng);
            const int im = coef(rng);
            if (re != 0 || im != 0) {
                p = p + PolySymbol::monomial(a, b, QComplex(Rational(re, 2), Rational(im, 3)));
            }
        }
    }
    return p;
}

} // namespace

TEST(Quantize, IdentityAndMultiplication)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const OperatorMatrix one = weyl_quantize(SymbolGrid::constant(grid, 1));
    EXPECT_LT(linalg::max_abs(one.matrix() - CMatrix::Identity(256, 256)), 1e-10);
    EXPECT_TRUE(one.aliasing_warning);
    EXPECT_FALSE(one.windowed);
    const auto v = [](double x) { return std::cos(x) + 0.1 * x * x; };
    const SymbolGrid a = SymbolGrid::sample([&](double x, double) { return cplx(v(x)); }, grid);
    const OperatorMatrix m = weyl_quantize(a);
    CMatrix want = CMatrix::Zero(256, 256);
    for (int j = 0; j < 256; ++j) {
        want(j, j) = v(grid.x(j));
    }
    EXPECT_LT(linalg::max_abs(m.matrix() - want), 1e-10);
}

TEST(Quantize, XiIsSpectralDerivative)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const OperatorMatrix d = weyl_quantize(symbols::sample("xi", grid));
    CVector u(256);
    CVector du(256);
    for (int j = 0; j < 256; ++j) {
        const double x = grid.x(j);
        u(j) = std::exp(-x * x);
        du(j) = -I * (-2.0 * x * std::exp(-x * x));   // D = -i d/dx
    }
    EXPECT_LT((d.matrix() * u - du).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Quantize, RejectsIncompatibleGrid)
{
    const PhaseGrid grid(8.0, 8.0, 64, 64);
    try {
        weyl_quantize(SymbolGrid::constant(grid, 1));
        FAIL() << "expected incompatible-grid error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IncompatibleGrid);
    }
}

TEST(Quantize, AdjointCovariance)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    const SymbolGrid a = SymbolGrid::sample(
        [](double x, double xi) { return cplx(std::exp(-x * x - 0.1 * xi * xi), 0.3 * x * std::exp(-xi * xi)); }, grid);
    const OperatorMatrix qa = weyl_quantize(a);
    const OperatorMatrix qs = weyl_quantize(a.adjoint());
    EXPECT_LT(linalg::max_abs(qs.matrix() - qa.matrix().adjoint()), 1e-8);
    EXPECT_LT(weyl_quantize(symbols::sample("harmonic", grid)).hermitian_residual(), 1e-8);
    const SymbolGrid m = symbols::sample("elliptic-2x2", grid);
    EXPECT_LT(linalg::max_abs(weyl_quantize(m.adjoint()).matrix() - weyl_quantize(m).matrix().adjoint()), 1e-8);
}

TEST(Dequantize, Examples)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolGrid one = dequantize(OperatorMatrix::identity(grid));
    EXPECT_LT(one.max_abs([](int, int) { return true; }) - 1.0, 1e-8);
    EXPECT_LT((one - SymbolGrid::constant(grid, 1)).max_abs(), 1e-8);
    CMatrix diag = CMatrix::Zero(256, 256);
    for (int j = 0; j < 256; ++j) {
        diag(j, j) = std::sin(grid.x(j));
    }
    const SymbolGrid v = dequantize(OperatorMatrix(grid, 1, diag));
    const SymbolGrid want = SymbolGrid::sample([](double x, double) { return cplx(std::sin(x)); }, grid);
    EXPECT_LT((v - want).max_abs(), 1e-8);
}

TEST(Dequantize, GaussianRoundTrip)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolGrid g = symbols::sample("gauss", grid);
    const SymbolGrid back = dequantize(weyl_quantize(g));
    EXPECT_LE((back - g).max_abs() / g.max_abs(), 1e-6);
    const SymbolGrid shifted = SymbolGrid::sample(
        [](double x, double xi) { return cplx(std::exp(-(x - 1) * (x - 1) - 0.5 * (xi + 2) * (xi + 2)), 0.0); }, grid);
    EXPECT_LE((dequantize(weyl_quantize(shifted)) - shifted).max_abs() / shifted.max_abs(), 1e-6);
}

TEST(Dequantize, MatrixFiberRoundTrip)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    const SymbolGrid a = SymbolGrid::sample(
        [](double x, double xi) {
            CMatrix m(2, 2);
            const double g = std::exp(-x * x - xi * xi);
            m << g, I * g * x, 2.0 * g, cplx(1.0, 0.0) * std::exp(-x * x - 0.5 * xi * xi);
            return m;
        },
        grid, 2);
    EXPECT_LE((dequantize(weyl_quantize(a)) - a).max_abs(), 1e-6);
}

TEST(HarmonicOscillator, LowestEigenvalues)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 512);
    const OperatorMatrix h = weyl_quantize(symbols::sample("harmonic", grid));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h.matrix() + h.matrix().adjoint()), Eigen::EigenvaluesOnly);
    for (int k = 0; k < 10; ++k) {
        EXPECT_NEAR(es.eigenvalues()(k), 2.0 * k + 1.0, 1e-6);
    }
}

TEST(Moyal, UnitAndGaussian)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolGrid one = SymbolGrid::constant(grid, 1);
    const SymbolGrid g = symbols::sample("gauss", grid);
    EXPECT_LT(core_distance(moyal(one, g), g), 1e-8);
    EXPECT_LT(core_distance(moyal(g, one), g), 1e-8);
}

TEST(Moyal, GridMatchesExactOracle)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 512);
    const SymbolGrid x = symbols::sample("x", grid);
    const SymbolGrid xi = symbols::sample("xi", grid);
    const MoyalResult r = moyal_with_flags(x, xi);
    EXPECT_TRUE(r.windowed);
    const PolySymbol want1 = moyal_poly(PolySymbol::x(), PolySymbol::xi());
    EXPECT_LT(core_distance(r.symbol, want1.sample(grid)), 1e-6);
    const SymbolGrid x2 = poly_on("x^2", grid);
    const SymbolGrid xi2 = poly_on("xi^2", grid);
    const PolySymbol want2 = moyal_poly(parse_poly("x^2"), parse_poly("xi^2"));
    EXPECT_LT(core_distance(moyal(x2, xi2), want2.sample(grid)), 1e-6);
}

TEST(Moyal, GridAssociativity)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolGrid a = symbols::sample("gauss", grid);
    const SymbolGrid b = SymbolGrid::sample([](double x, double xi) { return cplx(std::exp(-0.5 * (x - 1) * (x - 1) - 0.3 * xi * xi), 0.0); }, grid);
    const SymbolGrid c = SymbolGrid::sample([](double x, double xi) { return cplx(0.0, std::exp(-x * x - 0.2 * (xi - 1) * (xi - 1))); }, grid);
    const SymbolGrid left = moyal(moyal(a, b), c);
    const SymbolGrid right = moyal(a, moyal(b, c));
    EXPECT_LT((left - right).max_abs(), 1e-6);
}

TEST(Moyal, CompositionIdentity)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const SymbolGrid a = symbols::sample("gauss", grid);
    const SymbolGrid b = SymbolGrid::sample([](double x, double xi) { return cplx(x * std::exp(-0.5 * x * x - 0.25 * xi * xi)); }, grid);
    const CMatrix lhs = weyl_quantize(moyal(a, b, {})).matrix();
    const CMatrix rhs = (weyl_quantize(a) * weyl_quantize(b)).matrix();
    EXPECT_LT(linalg::max_abs(lhs - rhs), 1e-6 * linalg::max_abs(rhs));
}

TEST(MoyalPoly, Examples)
{
    const PolySymbol b = parse_poly("3*x^2*xi - i*xi + 1/2");
    EXPECT_EQ(moyal_poly(PolySymbol::constant(1), b), b);
    EXPECT_EQ(moyal_poly(PolySymbol::x(), PolySymbol::xi()), parse_poly("x*xi + i/2"));
    EXPECT_EQ(moyal_poly(parse_poly("x^2"), parse_poly("xi^2")), parse_poly("x^2*xi^2 + 2*i*x*xi - 1/2"));
    EXPECT_EQ(moyal_poly(PolySymbol::xi(), PolySymbol::x()), parse_poly("x*xi - i/2"));
}

TEST(MoyalPoly, AssociativityExactToDegreeSix)
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 12; ++t) {
        const int da = t % 3;
        const int db = (t / 3) % 3;
        const int dc = 6 - da - db > 2 ? 2 : 6 - da - db;
        const PolySymbol a = random_poly(rng, da);
        const PolySymbol b = random_poly(rng, db);
        const PolySymbol c = random_poly(rng, dc);
        EXPECT_EQ(moyal_poly(moyal_poly(a, b), c), moyal_poly(a, moyal_poly(b, c)));
    }
    const PolySymbol a = parse_poly("x^3 + i*xi");
    const PolySymbol b = parse_poly("xi^2 - x");
    const PolySymbol c = parse_poly("x*xi");
    EXPECT_EQ(moyal_poly(moyal_poly(a, b), c), moyal_poly(a, moyal_poly(b, c)));
}

TEST(MoyalPoly, LeadingTermIsPoissonBracket)
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const PolySymbol a = random_poly(rng, 1 + t % 3);
        const PolySymbol b = random_poly(rng, 1 + (t / 3) % 3);
        const PolySymbol rest = moyal_poly(a, b) - a * b - QComplex(0, Rational(1, 2)) * poisson_bracket(a, b);
        // Remaining terms are of second order: they vanish when either factor has degree <= 1.
        if (a.degree() <= 1 || b.degree() <= 1) {
            EXPECT_TRUE(rest.is_zero());
        }
        EXPECT_LE(rest.degree(), std::max(0, a.degree() + b.degree() - 4));
    }
}

TEST(MoyalPoly, MatrixCoefficientsKeepOrder)
{
    PolySymbol a(2);
    a.add_term({1, 0}, {QComplex(0), QComplex(1), QComplex(0), QComplex(0)});
    PolySymbol b(2);
    b.add_term({0, 1}, {QComplex(0), QComplex(0), QComplex(1), QComplex(0)});
    const PolySymbol ab = moyal_poly(a, b);
    const PolySymbol ba = moyal_poly(b, a);
    EXPECT_FALSE(ab == ba);
    const CMatrix v = ab.evaluate(1.0, 2.0);
    EXPECT_EQ(v(0, 0), cplx(2.0, 0.5));
    EXPECT_EQ(v(1, 1), cplx(0.0));
}

TEST(MoyalPoly, ParserErrors)
{
    EXPECT_THROW(parse_poly("x +"), Error);
    EXPECT_THROW(parse_poly("y"), Error);
    EXPECT_THROW(parse_poly("(x"), Error);
    EXPECT_THROW(parse_poly("x/0"), Error);
    EXPECT_EQ(parse_poly("-(x - xi)^2"), parse_poly("-x^2 + 2*x*xi - xi^2"));
}

TEST(OpSeminorm, ConstantSymbolCommutatorsVanish)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    const ConfinedFamily fam = partition_of_unity(grid, metrics::shubin(), 0.5);
    const OpSeminormResult r =
        op_seminorm_report(SymbolGrid::constant(grid, 1), weights::one(), metrics::shubin(), fam, 2, {.center_stride = 5});
    EXPECT_GT(r.centers_used, 0);
    EXPECT_GT(r.orders[0], 0.0);
    EXPECT_TRUE(std::isfinite(r.orders[0]));
    EXPECT_LT(r.orders[1], 1e-10);
    EXPECT_LT(r.orders[2], 1e-10);
}

TEST(OpSeminorm, AnnihilationStableUnderRefinement)
{
    const MetricField g = metrics::shubin();
    const PhaseGrid coarse = PhaseGrid::fourier(8.0, 128);
    const PhaseGrid fine = PhaseGrid::fourier(8.0, 256);
    // One center lattice for both grids, so only the discretization changes.
    const ConfinedFamily lattice = partition_of_unity(coarse, g, 0.5);
    std::vector<Point> centers;
    std::vector<double> volumes;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        centers.push_back(lattice.center(i));
        volumes.push_back(lattice.cell_volume(i));
    }
    std::vector<double> values;
    for (const PhaseGrid& grid : {coarse, fine}) {
        const ConfinedFamily fam(grid, g, 0.5, centers, volumes);
        values.push_back(op_seminorm(symbols::sample("annihilation", grid), weights::bracket(1.0), g, fam, 0,
                                     {.center_radius = 3.0}));
    }
    EXPECT_GT(values[0], 0.0);
    EXPECT_NEAR(values[0], values[1], 0.1 * values[1]);
}

TEST(ChainDecay, SeparatedCentersDecay)
{
    const PhaseGrid grid = PhaseGrid::fourier(16.0, 256);
    const MetricField e = metrics::euclidean();
    const ChainDecayReport rep = confined_chain_decay({point2(0, 0), point2(5, 0), point2(10, 0)}, e, 1.0, grid);
    EXPECT_EQ(rep.nu, 2);
    EXPECT_LT(rep.lhs, 1e-3 * rep.product_of_norms);
    const ChainDecayReport same = confined_chain_decay({point2(1, 1), point2(1, 1), point2(1, 1)}, e, 1.0, grid);
    EXPECT_TRUE(same.fit_undefined);
    EXPECT_LE(same.lhs, same.product_of_norms + 1e-12);
}

TEST(ChainDecay, SpacedVersusClustered)
{
    const PhaseGrid grid = PhaseGrid::fourier(16.0, 256);
    const MetricField e = metrics::euclidean();
    std::vector<Point> spaced;
    std::vector<Point> clustered;
    for (int j = 0; j < 5; ++j) {
        spaced.push_back(point2(-6.0 + 3.0 * j, 0.0));
        clustered.push_back(point2(-1.0 + 0.5 * j, 0.0));
    }
    const ChainDecayReport a = confined_chain_decay(spaced, e, 1.0, grid);
    const ChainDecayReport b = confined_chain_decay(clustered, e, 1.0, grid);
    ASSERT_FALSE(a.fit_undefined);
    EXPECT_GT(a.N0, 0.0);
    EXPECT_LT(a.lhs, b.lhs);
}
