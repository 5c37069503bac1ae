#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "nblab/nb_functional.hpp"
#include "oracle_values.hpp"
#include "support/nelder_mead.hpp"

using nblab::Complex;
using nblab::DirichletPoly;
using nblab::QuadratureGrid;

namespace {

const nblab::EvalAccuracy kAcc{1e-10};

const QuadratureGrid& grid_1000()
{
    static const QuadratureGrid grid = nblab::build_grid(1000.0, 16, kAcc, {200, true, 0});
    return grid;
}

const QuadratureGrid& grid_100_short()
{
    static const QuadratureGrid grid = nblab::build_grid(100.0, 16, kAcc, {10, true, 0});
    return grid;
}

}  // namespace

TEST(GaussLegendre, ExactForHighDegree)
{
    for (int n : {8, 16, 32}) {
        const auto& rule = nblab::gauss_legendre(n);
        double wsum = 0.0;
        double moment = 0.0;
        for (int k = 0; k < n; ++k) {
            wsum += rule.weights[k];
            moment += rule.weights[k] * std::pow(rule.nodes[k], 2 * n - 2);
            if (k > 0) {
                EXPECT_LT(rule.nodes[k - 1], rule.nodes[k]);
            }
        }
        EXPECT_NEAR(wsum, 2.0, 1e-14);
        EXPECT_NEAR(moment, 2.0 / (2 * n - 1), 1e-14);
    }
}

TEST(GaussLegendre, TailRowsRecoverTopCoefficient)
{
    const int n = 16;
    const auto& rule = nblab::gauss_legendre(n);
    // f = P_{n-1}: discrete coefficient c_{n-1} = 1 and c_{n-2} = 0.
    std::vector<double> f(n);
    for (int k = 0; k < n; ++k) {
        const double x = rule.nodes[k];
        double p0 = 1.0;
        double p1 = x;
        for (int q = 2; q <= n - 1; ++q) {
            const double p2 = ((2 * q - 1) * x * p1 - (q - 1) * p0) / q;
            p0 = p1;
            p1 = p2;
        }
        f[k] = p1;
    }
    double c1 = 0.0;
    double c2 = 0.0;
    for (int k = 0; k < n; ++k) {
        c1 += rule.tail_rows[0][k] * f[k];
        c2 += rule.tail_rows[1][k] * f[k];
    }
    EXPECT_NEAR(c1, 1.0, 1e-12);
    EXPECT_NEAR(c2, 0.0, 1e-12);
}

TEST(Grid, WeightIntegralIsOne)
{
    const auto& g = grid_1000();
    EXPECT_NEAR(g.weight_integral, 1.0, 1e-8);
    EXPECT_EQ(g.zeta_cache.size(), g.nodes.size());
    EXPECT_GE(g.est_tail, 0.0);
    for (std::size_t k = 1; k < g.nodes.size(); ++k)
        ASSERT_LT(g.nodes[k - 1], g.nodes[k]);
}

TEST(Grid, RuleDoublingIsStable)
{
    const nblab::GridOptions no_zeta{200, false, 0};
    const auto g8 = nblab::build_grid(1000.0, 8, kAcc, no_zeta);
    const auto g16 = nblab::build_grid(1000.0, 16, kAcc, no_zeta);
    const auto g32 = nblab::build_grid(1000.0, 32, kAcc, no_zeta);
    EXPECT_LT(std::abs(g8.weight_integral - g16.weight_integral), 1e-10);
    EXPECT_LT(std::abs(g16.weight_integral - g32.weight_integral), 1e-10);
}

TEST(Grid, TruncationDifferenceIsAnalyticTail)
{
    const nblab::GridOptions no_zeta{50, false, 0};
    const auto a = nblab::build_grid(100.0, 16, kAcc, no_zeta);
    const auto b = nblab::build_grid(200.0, 16, kAcc, no_zeta);
    const double qa = a.weight_integral - a.est_tail;
    const double qb = b.weight_integral - b.est_tail;
    EXPECT_NEAR(qb - qa, nblab::bare_weight_tail(100.0) - nblab::bare_weight_tail(200.0), 1e-10);
}

TEST(Grid, RejectsBadArguments)
{
    EXPECT_THROW((void)nblab::build_grid(0.0, 16), nblab::Error);
    EXPECT_THROW((void)nblab::build_grid(100.0, 12), nblab::Error);
    EXPECT_THROW((void)nblab::build_grid(2e6, 16), nblab::Error);
    EXPECT_THROW((void)nblab::build_grid(100.0, 16, nblab::EvalAccuracy{-1.0}), nblab::Error);
}

TEST(Distance, MatchesHighPrecisionQuadrature)
{
    const auto mu = nblab::moebius_sieve(10);
    const auto grid = nblab::build_grid(100.0, 16, kAcc, {10, true, 0});
    const auto rep = nblab::distance_integral(nblab::build_VN(10, mu), grid);
    EXPECT_NEAR(rep.value - rep.tail_estimate, nblab::oracle::kTruncatedDistanceV10To100, 1e-9);
    EXPECT_LT(rep.quad_error, 1e-8);
}

TEST(Distance, ZeroPolynomialGivesWeight)
{
    const auto rep = nblab::distance_integral(DirichletPoly({0.0}), grid_1000());
    EXPECT_NEAR(rep.value, 1.0, 1e-8);
    EXPECT_EQ(rep.tail_estimate, nblab::bare_weight_tail(1000.0));
}

TEST(Distance, LengthTwoIsFinitePositive)
{
    const auto mu = nblab::moebius_sieve(2);
    const auto rep = nblab::distance_integral(nblab::build_VN(2, mu), grid_1000());
    EXPECT_GT(rep.value, 0.0);
    EXPECT_TRUE(std::isfinite(rep.value));
    // V_2 = 1, so the value is c - 2 b_1 + G_11 = 1 - 2(gamma - 1) + (log 2pi - gamma) up to truncation.
    const double closed = 1.0 - 2.0 * nblab::oracle::kGammaMinusOne + nblab::oracle::kLog2PiMinusGamma;
    EXPECT_NEAR(rep.value, closed, 2e-3);
}

TEST(Distance, MirroredGridReproducesValue)
{
    const auto mu = nblab::moebius_sieve(100);
    const auto v = nblab::build_VN(100, mu);
    const auto& g = grid_1000();
    const auto mirrored = nblab::mirror(g);
    ASSERT_LT(mirrored.nodes.front(), mirrored.nodes.back());
    const auto a = nblab::distance_integral(v, g);
    const auto b = nblab::distance_integral(v, mirrored);
    EXPECT_NEAR(a.value, b.value, 1e-12);
}

TEST(Distance, ThreadCountDoesNotChangeBits)
{
    const auto mu = nblab::moebius_sieve(50);
    const auto v = nblab::build_VN(50, mu);
    const auto a = nblab::distance_integral(v, grid_1000(), 1);
    const auto b = nblab::distance_integral(v, grid_1000(), 3);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.quad_error, b.quad_error);
    const auto ga = nblab::gram_assemble(20, grid_1000(), 1);
    const auto gb = nblab::gram_assemble(20, grid_1000(), 3);
    EXPECT_TRUE(ga.G == gb.G);
    EXPECT_TRUE(ga.b == gb.b);
}

TEST(Distance, RejectsUncachedOrShortGrid)
{
    const auto bare = nblab::build_grid(50.0, 8, kAcc, {10, false, 0});
    EXPECT_THROW((void)nblab::distance_integral(DirichletPoly({1.0}), bare), nblab::Error);
    EXPECT_THROW((void)nblab::distance_integral(DirichletPoly(std::vector<double>(11, 1.0)), grid_100_short()),
                 nblab::Error);
}

TEST(Gram, SymmetricAndClosedForms)
{
    const auto sys = nblab::gram_assemble(30, grid_1000());
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 30; ++j)
            ASSERT_EQ(sys.G(i, j), sys.G(j, i));
    EXPECT_EQ(sys.c, 1.0);
    // Truncation at 1000 misses about 2 gamma / (pi T) in G_11 and 1 / (pi T) in b_1.
    EXPECT_NEAR(sys.G(0, 0), nblab::oracle::kLog2PiMinusGamma, 1e-3);
    EXPECT_NEAR(sys.b(0), nblab::oracle::kGammaMinusOne, 1e-3);
}

TEST(Gram, OneTermTwoPaths)
{
    const auto& g = grid_1000();
    const auto sys = nblab::gram_assemble(1, g);
    const double d1 = 1.0 - sys.b(0) * sys.b(0) / sys.G(0, 0);
    const auto best = nblab::optimal_dN2(sys);
    EXPECT_NEAR(best.d2, d1, 1e-14);
    const auto rep = nblab::distance_integral(best.coeffs, g);
    EXPECT_NEAR(rep.value, d1, 1e-9);
    const double closed = 1.0 - nblab::oracle::kGammaMinusOne * nblab::oracle::kGammaMinusOne /
                                    nblab::oracle::kLog2PiMinusGamma;
    EXPECT_NEAR(d1, closed, 2e-3);
}

TEST(Gram, QuadraticFormMatchesDistance)
{
    const auto mu = nblab::moebius_sieve(40);
    const auto v = nblab::build_VN(40, mu);
    const auto sys = nblab::gram_assemble(40, grid_1000());
    const Eigen::Map<const Eigen::VectorXd> a(v.coeffs().data(), 40);
    const double form = sys.c - 2.0 * sys.b.dot(a) + a.dot(sys.G * a);
    EXPECT_NEAR(form, nblab::distance_integral(v, grid_1000()).value, 1e-9);
}

TEST(Gram, SimplexSearchOracle)
{
    const auto& g = grid_100_short();
    const auto mu = nblab::moebius_sieve(5);
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto best = nblab::optimal_dN2(nblab::gram_assemble(n, g));
        auto objective = [&](const std::vector<double>& a) { return nblab::distance_integral(DirichletPoly(a), g).value; };
        std::vector<double> start(n, 0.0);
        start[0] = 1.0;
        const auto found = nblab::testing::nelder_mead(objective, start, 0.25, 20000, 1e-14);
        EXPECT_NEAR(objective(found), best.d2, 1e-4) << n;
        EXPECT_GE(objective(found), best.d2 - 1e-10) << n;
    }
}

TEST(Optimal, BudgetsAndMonotonicity)
{
    const auto& g = grid_1000();
    const auto mu = nblab::moebius_sieve(200);
    double previous = 1.0;
    double previous_budget = 0.0;
    for (std::size_t n : {10u, 50u, 100u, 200u}) {
        const auto rep = nblab::distance_integral(nblab::build_VN(n, mu), g);
        const auto best = nblab::optimal_dN2(nblab::gram_assemble(n, g));
        EXPECT_FALSE(best.clamped);
        EXPECT_LE(best.d2, rep.value + 2.0 * rep.budget()) << n;
        EXPECT_LE(best.d2, previous + 2.0 * previous_budget) << n;
        previous = best.d2;
        previous_budget = rep.budget();
        if (n == 100) {
            EXPECT_LT(std::abs(best.coeffs.coeff(1) - 1.0), 0.2);
        }
    }
}

TEST(Scan, TrendAndReferenceConstant)
{
    EXPECT_NEAR(nblab::kNymanBeurlingConstant, nblab::oracle::kNbConstant, 1e-15);
    const std::vector<std::size_t> ns{50, 100, 200};
    const auto scan = nblab::asymptote_scan(ns, grid_1000(), {100, 0});
    ASSERT_EQ(scan.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& row = scan.rows[i];
        EXPECT_GT(row.I_logN, nblab::kNymanBeurlingConstant - 3.0 * (row.quad_error + row.tail) * std::log(row.N));
        if (i > 0) {
            EXPECT_LT(row.I_logN, scan.rows[i - 1].I_logN);
        }
    }
    EXPECT_TRUE(std::isfinite(scan.rows[1].d2_opt));
    EXPECT_TRUE(std::isnan(scan.rows[2].d2_opt));

    const std::vector<std::size_t> unsorted{100, 50};
    EXPECT_THROW((void)nblab::asymptote_scan(unsorted, grid_1000()), nblab::Error);
    const std::vector<std::size_t> degenerate{1, 50};
    EXPECT_THROW((void)nblab::asymptote_scan(degenerate, grid_1000()), nblab::Error);
}
