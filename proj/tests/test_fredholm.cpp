#include "psido/fredholm.hpp"
#include "psido/symbols/registry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace psido;

namespace {

SymbolBuilder builtin(const std::string& id)
{
    return [id](const PhaseGrid& grid) { return symbols::sample(id, grid); };
}

CVector gaussian(const PhaseGrid& grid, double x0, double omega, double width = 1.0)
{
    CVector u(grid.nx());
    for (int j = 0; j < grid.nx(); ++j) {
        const double x = grid.x(j) - x0;
        u(j) = std::exp(-x * x / (2.0 * width * width)) * std::exp(I * omega * grid.x(j));
    }
    return u / std::sqrt(u.squaredNorm() * grid.dx());
}

const std::vector<int> truncations{128, 256, 512};

} // namespace

TEST(Index, Identity)
{
    const IndexReport rep =
        numerical_index([](int nx) { return OperatorMatrix::identity(PhaseGrid::fourier(8.0, nx)); }, truncations);
    EXPECT_EQ(rep.dim_ker, 0);
    EXPECT_EQ(rep.dim_coker, 0);
    EXPECT_EQ(rep.index, 0);
    EXPECT_TRUE(rep.stable);
}

TEST(Index, AnnihilationAndCreation)
{
    auto build = [](const std::string& id) {
        return [id](int nx) { return weyl_quantize(symbols::sample(id, PhaseGrid::fourier(8.0, nx))); };
    };
    const IndexReport ann = numerical_index(build("annihilation"), truncations);
    EXPECT_EQ(ann.dim_ker, 1);
    EXPECT_EQ(ann.dim_coker, 0);
    EXPECT_EQ(ann.index, 1);
    EXPECT_TRUE(ann.stable);
    // the kernel is the discrete Gaussian
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 512);
    const CVector g = gaussian(grid, 0.0, 0.0) * std::sqrt(grid.dx());
    EXPECT_LT(linalg::principal_angle_sin(ann.truncations.back().kernel, g), 1e-8);

    const IndexReport cre = numerical_index(build("creation"), truncations);
    EXPECT_EQ(cre.index, -1);
    EXPECT_TRUE(cre.stable);

    // index(A*) = -index(A)
    const IndexReport adj =
        numerical_index([&](int nx) { return build("annihilation")(nx).adjoint(); }, truncations);
    EXPECT_EQ(adj.index, -ann.index);
}

TEST(Index, ErrorsWithoutGap)
{
    const std::vector<int> two{128, 256};
    EXPECT_THROW(numerical_index([](int nx) { return OperatorMatrix::identity(PhaseGrid::fourier(8.0, nx)); }, two),
                 Error);
    for (const char* id : {"vanishing", "normalized-degenerate"}) {
        try {
            numerical_index([id](int nx) { return weyl_quantize(symbols::sample(id, PhaseGrid::fourier(8.0, nx))); },
                            truncations);
            FAIL() << id;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::NoSpectralGap) << id;
        }
    }
}

TEST(Riesz, Examples)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    // invertible with sigma_min^2 > radius: empty inside
    const OperatorMatrix A = weyl_quantize(symbols::sample("harmonic+1", grid));
    const RieszProjector empty = riesz_projector(A, 1.0);
    EXPECT_LT(linalg::max_abs(empty.B), 1e-10);
    EXPECT_EQ(empty.rank, 0);

    CMatrix diag = CMatrix::Zero(128, 128);
    for (int i = 0; i < 128; ++i) {
        diag(i, i) = static_cast<double>(i);
    }
    const RieszProjector e0 = riesz_projector(OperatorMatrix(grid, 1, diag), 0.5);
    CMatrix want = CMatrix::Zero(128, 128);
    want(0, 0) = 1.0;
    EXPECT_LT(linalg::max_abs(e0.B - want), 1e-10);

    try {
        riesz_projector(OperatorMatrix(grid, 1, diag), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EigenvalueOnContour);
    }
}

TEST(Riesz, AnnihilationKernel)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const OperatorMatrix A = weyl_quantize(symbols::sample("annihilation", grid));
    const RieszProjector b = riesz_projector(A, 1.0);
    EXPECT_EQ(b.rank, 1);
    EXPECT_LE(b.idempotence, 1e-8);
    EXPECT_LE(b.self_adjointness, 1e-8);
    EXPECT_LE(b.kernel_angle, 1e-6);
    const CVector g = gaussian(grid, 0.0, 0.0) * std::sqrt(grid.dx());
    EXPECT_LT((b.B * g - g).norm(), 1e-8);
}

TEST(Compactness, Examples)
{
    const std::vector<int> sizes{128, 256};
    const CompactnessReport zero =
        compactness_probe([](const PhaseGrid& g) { return SymbolGrid::constant(g, 1, cplx(0.0)); }, 8.0, sizes);
    for (const auto& t : zero.truncations) {
        EXPECT_EQ(t.sigma.maxCoeff(), 0.0);
    }
    const CompactnessReport one =
        compactness_probe([](const PhaseGrid& g) { return SymbolGrid::constant(g, 1); }, 8.0, sizes);
    for (const auto& t : one.truncations) {
        EXPECT_LT((t.sigma.array() - 1.0).abs().maxCoeff(), 1e-10);
    }
    const CompactnessReport inv = compactness_probe(builtin("shubin-weight-s:-1"), 8.0, sizes);
    EXPECT_TRUE(inv.stable);
    for (const auto& t : inv.truncations) {
        EXPECT_TRUE(t.monotone);
        EXPECT_LT(t.sigma(99), 0.75 * t.sigma(49));
    }
}

TEST(Sobolev, EquivalenceWithL2)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    const ConfinedFamily fam = partition_of_unity(grid, metrics::shubin(), 0.5);
    const SobolevNorm h(weights::one(), fam);
    EXPECT_EQ(h(CVector::Zero(128)).value, 0.0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> freq(-6.0, 6.0);
    std::uniform_real_distribution<double> wid(0.5, 1.5);
    double C = 1.0;
    for (int i = 0; i < 50; ++i) {
        const SobolevReport r = h(gaussian(grid, pos(rng), freq(rng), wid(rng)));
        C = std::max({C, r.ratio, 1.0 / r.ratio});
    }
    EXPECT_LE(C, 10.0);
    EXPECT_THROW(h(CVector::Zero(64)), Error);
}

TEST(Sobolev, WeightSeesFrequency)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    const ConfinedFamily fam = partition_of_unity(grid, metrics::shubin(), 0.5);
    const SobolevNorm h(weights::bracket(1.0), fam);
    const double slow = h(gaussian(grid, 0.0, 0.0)).value;
    const double fast = h(gaussian(grid, 0.0, 0.8 * grid.lxi())).value;
    EXPECT_GT(fast, slow);
}

TEST(Conjugators, Examples)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    const MetricField g = metrics::shubin();
    const WeightConjugators same = weight_conjugators(weights::bracket(1.0), weights::bracket(1.0), g, grid);
    EXPECT_LT(core_distance(same.b1, SymbolGrid::constant(grid, 1)), 1e-12);
    EXPECT_LT(core_distance(same.b2, SymbolGrid::constant(grid, 1)), 1e-10);
    const WeightConjugators w1 = weight_conjugators(weights::bracket(1.0), weights::one(), g, grid);
    EXPECT_LE(w1.residual, 1e-6);
    const WeightConjugators w2 = weight_conjugators(weights::bracket(2.0), weights::bracket(1.0), g, grid);
    EXPECT_LE(w2.residual, 1e-6);
}

TEST(FredholmCheck, IndexInvariance)
{
    const MetricField g = metrics::shubin();
    for (const Weight& m1 : {weights::one(), weights::bracket(1.0), weights::bracket(2.0)}) {
        const IndexReport rep = fredholm_check(builtin("annihilation"), weights::bracket(1.0), m1, g, 8.0, truncations);
        EXPECT_EQ(rep.index, 1) << m1.label();
        EXPECT_TRUE(rep.stable) << m1.label();
    }
    const IndexReport harm =
        fredholm_check(builtin("harmonic+1"), weights::bracket(2.0), weights::bracket(1.0), g, 8.0, truncations);
    EXPECT_EQ(harm.index, 0);
    EXPECT_EQ(harm.dim_ker, 0);
    const IndexReport one = fredholm_check(builtin("one"), weights::one(), weights::bracket(1.0), g, 8.0, truncations);
    EXPECT_EQ(one.index, 0);
}

TEST(Parametrix, Examples)
{
    const PhaseGrid grid = PhaseGrid::fourier(8.0, 256);
    const MetricField g = metrics::shubin();
    const Parametrix unit = parametrix(SymbolGrid::constant(grid, 1), weights::one(), g, 1.0);
    EXPECT_LT(core_distance(unit.symbol, SymbolGrid::constant(grid, 1)), 1e-12);
    EXPECT_LT(unit.report.sup_weighted, 1e-10);

    for (const auto& [id, m] : {std::pair{"annihilation", weights::bracket(1.0)},
                                std::pair{"harmonic+1", weights::bracket(2.0)}}) {
        const Parametrix p = parametrix(symbols::sample(id, grid), m, g, 1.0);
        EXPECT_LE(p.report.sup_weighted, 10.0) << id;
        EXPECT_TRUE(p.report.decreasing) << id;
    }
    try {
        parametrix(symbols::sample("normalized-degenerate", grid), weights::one(), g, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EllipticityFailure);
    }
}

TEST(Converse, Examples)
{
    const MetricField g = metrics::shubin();
    const ConverseReport one = converse_experiment(builtin("one"), g, 8.0, truncations);
    EXPECT_TRUE(one.fredholm);
    EXPECT_TRUE(one.elliptic);
    ASSERT_TRUE(one.biconditional.has_value());
    EXPECT_TRUE(*one.biconditional);

    const ConverseReport ell = converse_experiment(builtin("normalized-annihilation"), g, 8.0, truncations);
    EXPECT_TRUE(ell.fredholm);
    EXPECT_TRUE(ell.elliptic);
    EXPECT_EQ(ell.index.index, 1);
    ASSERT_TRUE(ell.projector.has_value());
    EXPECT_EQ(ell.projector->rank, 1);
    EXPECT_LT(ell.residual_away, ell.residual_near);

    const ConverseReport van = converse_experiment(builtin("normalized-degenerate"), g, 8.0, truncations);
    EXPECT_FALSE(van.elliptic);
    EXPECT_TRUE(van.inconclusive);
    EXPECT_FALSE(van.biconditional.has_value());
}
