#include "psido/inversion/regularity.hpp"
#include "psido/symbols/registry.hpp"

#include <gtest/gtest.h>

using namespace psido;

namespace {

const PhaseGrid& grid128()
{
    static const PhaseGrid grid = PhaseGrid::fourier(8.0, 128);
    return grid;
}

SymbolGrid gauss_plus(double c, double s)
{
    return SymbolGrid::constant(grid128(), 1, cplx(c)) + symbols::sample("gauss", grid128()) * cplx(s);
}

SymbolGrid direct_inverse(const SymbolGrid& a)
{
    const OperatorMatrix A = weyl_quantize(a);
    return dequantize(A.like(A.matrix().inverse()));
}

} // namespace

TEST(Neumann, ZeroAndConstant)
{
    const SymbolGrid zero = SymbolGrid::constant(grid128(), 1, cplx(0.0));
    auto [r0, rep0] = neumann_inverse(zero);
    EXPECT_LT(core_distance(r0, SymbolGrid::constant(grid128(), 1)), 1e-12);
    EXPECT_EQ(rep0.m_star, 0);

    const cplx rho(0.4, -0.3);
    auto [r1, rep1] = neumann_inverse(SymbolGrid::constant(grid128(), 1, rho));
    EXPECT_LT(core_distance(r1, SymbolGrid::constant(grid128(), 1, 1.0 / (1.0 - rho))), 1e-10);
    EXPECT_NEAR(rep1.operator_contraction, std::abs(rho), 1e-10);
    EXPECT_TRUE(rep1.converged);
}

TEST(Neumann, GaussMatchesDirectInverse)
{
    const SymbolGrid r = symbols::sample("gauss", grid128()) * cplx(0.3);
    auto [R, rep] = neumann_inverse(r);
    const SymbolGrid one = SymbolGrid::constant(grid128(), 1);
    EXPECT_LT(core_distance(moyal(R, one - r), one), 1e-6);
    EXPECT_LT(core_distance(R, direct_inverse(one - r)), 1e-6);
    EXPECT_TRUE(rep.converged);
    for (double q : rep.fitted_ratio) {
        EXPECT_LT(q, 1.0);
    }
}

TEST(Neumann, Errors)
{
    const SymbolGrid big = SymbolGrid::constant(grid128(), 1, cplx(1.2));
    try {
        neumann_inverse(big);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ContractionViolated);
    }
    NeumannOptions opts;
    opts.m_cap = 10;
    try {
        neumann_inverse(SymbolGrid::constant(grid128(), 1, cplx(0.99)), opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotConverged);
    }
}

TEST(Neumann, DoublingAgreesWithDirectSum)
{
    // ||gauss^w|| = 1/2, so eps = 0.95 needs m* > 64 and takes the doubling route.
    const SymbolGrid r = symbols::sample("gauss", grid128()) * cplx(1.9);
    auto [R, rep] = neumann_inverse(r);
    EXPECT_TRUE(rep.doubling);
    const SymbolGrid one = SymbolGrid::constant(grid128(), 1);
    EXPECT_LT(core_distance(R, direct_inverse(one - r)), 1e-8);
}

TEST(SymbolInverse, Constants)
{
    const SymbolGrid one = SymbolGrid::constant(grid128(), 1);
    EXPECT_LT(core_distance(symbol_inverse(one), one), 1e-10);
    const cplx c(2.0, -1.5);
    const SymbolGrid b = symbol_inverse(SymbolGrid::constant(grid128(), 1, c));
    EXPECT_LT(core_distance(b, SymbolGrid::constant(grid128(), 1, 1.0 / c)), 1e-10);
}

TEST(SymbolInverse, GaussPerturbation)
{
    const SymbolGrid a = gauss_plus(1.0, 0.4);
    const SymbolInverse s = symbol_inverse_full(a);
    EXPECT_LT(s.report.residual_left, 1e-5);
    EXPECT_LT(s.report.residual_right, 1e-5);
    EXPECT_LT(core_distance(s.symbol, direct_inverse(a)), 1e-5);
    EXPECT_TRUE(s.report.neumann.converged);
    for (double q : s.report.neumann.fitted_ratio) {
        EXPECT_LT(q, 1.0);
    }
}

TEST(SymbolInverse, InvolutionAdjointUniqueness)
{
    for (const SymbolGrid& a :
         {gauss_plus(1.0, 0.4), gauss_plus(1.0, -0.5) + symbols::sample("x", grid128()) * cplx(0.0, 0.05)}) {
        const SymbolGrid b = symbol_inverse(a);
        EXPECT_LT(core_distance(symbol_inverse(b), a), 1e-4);
        EXPECT_LT(core_distance(symbol_inverse(a.adjoint()), b.adjoint()), 1e-6);
        // Any two-sided inverse agrees with b up to the residual times ||b||.
        const SymbolGrid b2 = direct_inverse(a);
        const SymbolGrid one = SymbolGrid::constant(grid128(), 1);
        const double tau = std::max(core_distance(moyal(b2, a), one), core_distance(moyal(a, b2), one));
        const double bound = weyl_quantize(b).norm() * std::max(tau, 1e-12);
        EXPECT_LT(core_distance(b, b2), 10.0 * bound + 1e-9);
    }
}

TEST(SymbolInverse, NonInvertible)
{
    const SymbolGrid a = gauss_plus(0.0, 1.0);
    try {
        symbol_inverse(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonInvertible);
    }
}

TEST(Family, ExamplesAndContinuity)
{
    const SymbolFamily constant = SymbolFamily::sample([](double) { return gauss_plus(1.0, 0.4); }, 0.0, 0.25, 3);
    const FamilyInverse ci = family_inverse_full(constant);
    EXPECT_LT(core_distance(ci.inverses[0], ci.inverses[2]), 1e-12);

    const SymbolFamily lin = SymbolFamily::sample([](double l) { return gauss_plus(1.0, 0.3 * l); }, 0.0, 0.25, 5);
    const FamilyInverse li = family_inverse_full(lin);
    for (double r : li.report.residual) {
        EXPECT_LT(r, 1e-5);
    }
    for (double q : li.report.continuity_ratio) {
        EXPECT_GT(q, 0.1);
        EXPECT_LT(q, 10.0);
    }

    const SymbolFamily rot = SymbolFamily::sample(
        [](double l) { return SymbolGrid::constant(grid128(), 1, std::exp(cplx(0.0, l))); }, 0.0, 0.5, 4);
    const SymbolFamily ri = family_inverse(rot);
    for (std::size_t i = 0; i < rot.size(); ++i) {
        EXPECT_LT(core_distance(ri[i], SymbolGrid::constant(grid128(), 1, std::exp(cplx(0.0, -rot.lambda(i))))),
                  1e-10);
    }
}

TEST(Family, MemberFailureCarriesIndex)
{
    const SymbolFamily bad = SymbolFamily::sample([](double l) { return gauss_plus(1.0 - l, 1.0); }, 0.0, 0.5, 3);
    try {
        family_inverse(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonInvertible);
        EXPECT_NE(std::string(e.what()).find("member 2"), std::string::npos);
    }
}

TEST(Regularity, ConstantFamilyIsExact)
{
    const SymbolFamily fam = SymbolFamily::sample([](double) { return gauss_plus(1.0, 0.4); }, 0.0, 0.1, 9);
    const RegularityReport rep = regularity_check(fam, family_inverse(fam), 3);
    ASSERT_EQ(rep.orders.size(), 3u);
    for (const auto& o : rep.orders) {
        EXPECT_LT(o.error_h, 1e-9);
    }
}

TEST(Regularity, GaussFamilySlope)
{
    const double h = 1.0 / 64.0;
    const SymbolFamily fam =
        SymbolFamily::sample([](double l) { return gauss_plus(1.0, 0.3 * l); }, 0.5 - 2.0 * h, h, 5);
    const RegularityReport rep = regularity_check(fam, family_inverse(fam), 1);
    EXPECT_LT(rep.orders[0].error_h, 1e-4);
    EXPECT_GE(rep.orders[0].slope, 1.9);
}

TEST(Regularity, ScalarClosedForm)
{
    const double h = 1.0 / 32.0;
    const SymbolFamily fam = SymbolFamily::sample(
        [](double l) { return SymbolGrid::constant(grid128(), 1, cplx(1.0 + l * l)); }, 0.3, h, 3);
    const double lam = fam.lambda(1);
    std::array<CMatrix, 3> da;
    std::vector<CMatrix> A;
    for (std::size_t i = 0; i < 3; ++i) {
        A.push_back(weyl_quantize(fam[i]).matrix());
    }
    const Eigen::Index n = A[0].rows();
    da[0] = detail::cd(A, 1, 1, h, 1);
    da[1] = da[2] = CMatrix::Zero(n, n);
    const CMatrix b = weyl_quantize(symbol_inverse(fam[1])).matrix();
    const CMatrix got = derivative_identity(b, da, 1);
    const double want = -2.0 * lam / std::pow(1.0 + lam * lam, 2);
    EXPECT_LT(linalg::max_abs(got - want * CMatrix::Identity(n, n)), 1e-10);
}

TEST(Regularity, InsufficientSamples)
{
    const SymbolFamily fam = SymbolFamily::sample([](double) { return gauss_plus(1.0, 0.4); }, 0.0, 0.1, 6);
    try {
        regularity_check(fam, fam, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientSamples);
    }
}
