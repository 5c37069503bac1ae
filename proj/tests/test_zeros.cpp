#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nblab/zeros.hpp"
#include "oracle_values.hpp"

using nblab::Complex;
using nblab::ZeroRecord;
using nblab::ZeroTable;

namespace {

const ZeroTable& table()
{
    static const ZeroTable t = nblab::load_zeros(std::string(NBLAB_DATA_DIR) + "/zeros_2500.txt");
    return t;
}

template <class F>
Complex contour_residue(F&& f, Complex centre, double radius, int points)
{
    Complex sum = 0.0;
    for (int k = 0; k < points; ++k) {
        const Complex u = std::polar(1.0, 2.0 * std::numbers::pi * k / points);
        sum += f(centre + radius * u) * radius * u;
    }
    return sum / static_cast<double>(points);
}

ZeroTable parse(const std::string& text, bool verify = false)
{
    std::istringstream in(text);
    nblab::LoadOptions opt;
    opt.verify = verify;
    return nblab::parse_zero_table(in, "inline", opt);
}

}  // namespace

TEST(LoadZeros, TableIsVerified)
{
    const auto& t = table();
    ASSERT_EQ(t.size(), 2500u);
    EXPECT_NEAR(t.records()[0].gamma, 14.134725142, 1e-9);
    EXPECT_EQ(t.count_below(100.0), 29u);
    EXPECT_NEAR(nblab::counting_main_term(100.0), 28.13, 0.01);
    EXPECT_LE(t.counting_excess(), 0.0);
    EXPECT_NEAR(std::abs(t.records()[0].zeta_prime), 0.7932, 1e-4);
    for (const auto& z : t.records())
        ASSERT_LT(std::abs(nblab::zeta(z.rho())), 1e-6) << z.gamma;
}

TEST(LoadZeros, ParseErrorsCarryLineNumbers)
{
    try {
        (void)parse("# header\n21.02\n14.13\n");
        FAIL();
    } catch (const nblab::ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("ordering"), std::string::npos);
    }
    try {
        (void)parse("14.13\nabc\n");
        FAIL();
    } catch (const nblab::ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW((void)parse("-3.0\n"), nblab::ParseError);
    EXPECT_THROW((void)parse("# only comments\n"), nblab::ParseError);
    EXPECT_THROW((void)nblab::load_zeros("/nonexistent/zeros.txt"), nblab::Error);
}

TEST(LoadZeros, VerificationRejectsNonZeros)
{
    try {
        (void)parse("14.134725141735\n20.0\n", true);
        FAIL();
    } catch (const nblab::Error& e) {
        EXPECT_EQ(e.kind(), nblab::ErrorKind::VerificationFailure);
        EXPECT_NE(std::string(e.what()).find("20.0"), std::string::npos);
    }
    // A missing zero breaks the counting invariant well before 3000.
    std::ostringstream gappy;
    for (const auto& z : table().records())
        if (z.gamma < 1000.0 || z.gamma > 1500.0)
            gappy << z.gamma << "\n";
    std::istringstream in(gappy.str());
    EXPECT_THROW((void)nblab::parse_zero_table(in, "gappy"), nblab::Error);
}

TEST(LoadZeros, CapTruncatesAndGuardsHeights)
{
    std::istringstream in("14.134725141735\n21.022039638772\n25.010857580146\n");
    nblab::LoadOptions opt;
    opt.verify = false;
    opt.t_cap = 22.0;
    const auto t = nblab::parse_zero_table(in, "capped", opt);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_THROW((void)t.up_to(30.0), nblab::Error);
    EXPECT_THROW((void)nblab::sum_inv_zeta_prime_sq(t, 30.0), nblab::Error);
}

TEST(ZetaPrimeSums, EmptyAndSoftBand)
{
    EXPECT_EQ(nblab::sum_inv_zeta_prime_sq(table(), 10.0), 0.0);
    // One-sided sum to 300, summed independently in mpmath.
    EXPECT_NEAR(nblab::sum_inv_zeta_prime_sq(table(), 300.0), 29.6667112557, 1e-8);
    const double ratio = 2.0 * nblab::sum_inv_zeta_prime_sq(table(), 1000.0) / (nblab::oracle::kGonekCoefficient * 2000.0);
    // Regression pin; the band check lives in the acceptance suite.
    EXPECT_NEAR(ratio, 0.4733, 5e-4);
    const double slope = nblab::zeta_prime_exponent_fit(table(), 100.0, table().t_cap());
    EXPECT_LT(slope, 1.5);
    EXPECT_GT(slope, 0.5);
}

TEST(ZetaPrimeSums, MultipleZerosRefuse)
{
    std::vector<ZeroRecord> recs{{14.134725141735, Complex(0.78, 0.12), 2}};
    const ZeroTable t(recs, "synthetic", 20.0);
    try {
        (void)nblab::sum_inv_zeta_prime_sq(t, 20.0);
        FAIL();
    } catch (const nblab::Error& e) {
        EXPECT_EQ(e.kind(), nblab::ErrorKind::MultipleRoot);
    }
    EXPECT_THROW((void)nblab::r_term(recs[0], Complex(0.6, 5.0), 10), nblab::Error);
}

TEST(InvRhoSums, ConstantIdentity)
{
    double previous_partial = 0.0;
    double previous_tail = 1.0;
    std::vector<double> totals;
    for (double t : {500.0, 1000.0, 2000.0}) {
        const auto r = nblab::sum_inv_rho_sq(table(), t);
        EXPECT_GT(r.partial, previous_partial);
        EXPECT_LT(r.tail, previous_tail);
        previous_partial = r.partial;
        previous_tail = r.tail;
        totals.push_back(r.total());
    }
    EXPECT_NEAR(totals[1], nblab::oracle::kNbConstant, 1e-3);
    for (double a : totals)
        for (double b : totals)
            EXPECT_LT(std::abs(a - b), 2e-3);
}

TEST(FSeries, ZeroAndDomain)
{
    EXPECT_EQ(nblab::f_series(Complex(0.6, 5.0), 0.0), Complex(0.0));
    try {
        (void)nblab::f_series(Complex(-2.0, 0.0), 0.1);
        FAIL();
    } catch (const nblab::Error& e) {
        EXPECT_EQ(e.kind(), nblab::ErrorKind::DomainError);
    }
    EXPECT_THROW((void)nblab::f_series(Complex(0.5, 1.0), -1.0), nblab::Error);
}

TEST(FSeries, LeadingTerm)
{
    const Complex s(0.6, 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    double previous_gap = 1.0;
    for (double z : {0.1, 0.03, 0.01, 0.003}) {
        const Complex lead = -std::pow(two_pi, 3) * std::pow(Complex(z), 2.0 + s) /
                             (std::numbers::pi * 2.0 * nblab::oracle::kZeta3 * (2.0 + s) * (2.0 + s));
        const double gap = std::abs(nblab::f_series(s, z) / lead - 1.0);
        EXPECT_LT(gap, previous_gap);
        previous_gap = gap;
    }
    EXPECT_LT(previous_gap, 1e-3);
}

TEST(FSeries, SmallOnCriticalLine)
{
    for (std::size_t n : {100u, 200u, 1000u})
        for (double t : {0.0, 3.0, 9.9}) {
            const Complex s(0.5, t);
            if (std::abs(s) > 10.0)
                continue;
            EXPECT_LT(std::abs(nblab::f_series(s, 1.0 / static_cast<double>(n))), 1e-4);
        }
}

TEST(RTerm, ModulusAndContourResidue)
{
    const auto& z = table().records()[0];
    const Complex s(0.6, 5.0);
    const std::size_t n = 100;
    const Complex r = nblab::r_term(z, s, n);
    const double modulus = std::pow(100.0, 0.5 - 0.6) / (std::abs(z.zeta_prime) * std::norm(z.rho() - s));
    EXPECT_NEAR(std::abs(r), modulus, 1e-14);
    auto f = [&](Complex w) { return std::exp((w - s) * std::log(100.0)) / (nblab::zeta(w) * (w - s) * (w - s)); };
    const Complex oracle = contour_residue(f, z.rho(), 0.05, 64);
    EXPECT_LT(std::abs(r - oracle), 1e-8);
    const Complex conj_oracle = contour_residue(f, std::conj(z.rho()), 0.05, 64);
    EXPECT_LT(std::abs(nblab::r_term(z, s, n, true) - conj_oracle), 1e-8);
    EXPECT_THROW((void)nblab::r_term(z.rho(), z.zeta_prime, z.rho(), n), nblab::Error);
}

TEST(RTerm, DoublingWithinTailEstimate)
{
    const Complex s(0.6, 5.0);
    const std::size_t n = 100;
    const Complex a = nblab::sum_r_terms(table().up_to(1000.0), s, n);
    const Complex b = nblab::sum_r_terms(table().up_to(2000.0), s, n);
    EXPECT_LT(std::abs(b - a), nblab::r_tail_estimate(table(), s, n, 1000.0));
}

TEST(Lemma31, CentralCase)
{
    const auto r = nblab::lemma31_residual(100, Complex(0.6, 5.0), 1000.0, table());
    EXPECT_LT(r.residual, 1e-3);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.zeros_used, 600u);
    const auto r2 = nblab::lemma31_residual(100, Complex(0.6, 5.0), 2000.0, table());
    EXPECT_LE(r2.residual, r.residual + 1e-12);
}

TEST(Lemma31, LengthTwoReturnsOne)
{
    const auto r = nblab::lemma31_residual(2, Complex(0.5, 3.0), 1000.0, table());
    EXPECT_EQ(r.lhs, Complex(1.0));
    EXPECT_LT(std::abs(r.rhs - 1.0), r.truncation_estimate);
}

// The trivial-zero series carries 1/pi; a prefactor of pi instead fails badly at N = 2.
TEST(Lemma31, PrefactorIsOneOverPi)
{
    const Complex s(0.6, 5.0);
    const auto r = nblab::lemma31_residual(2, s, 1000.0, table());
    const Complex f = nblab::f_series(s, 0.5) / std::log(2.0);
    const Complex rhs_pi = r.rhs - f + std::numbers::pi * std::numbers::pi * f;
    EXPECT_LT(r.residual, 1e-3);
    EXPECT_GT(std::abs(r.lhs - rhs_pi), 0.5);
}

// Doubling T shrinks the truncation envelope but not necessarily the residual:
// the tail is an oscillating zero sum, and at (300, 0.6+40i) the T = 1000 tail
// happens to cancel to 4.8e-8, then grows to 1.8e-7 at T = 2000, both far under
// the envelope. That pair is pinned as the one known exception, so a change in
// the set of violators shows up here.
TEST(Lemma31, ResidualShrinksWhenHeightDoubles)
{
    const std::vector<std::pair<std::size_t, Complex>> cases{
        {10, {0.4, 7.0}},   {30, {0.4, 2.0}},  {100, {0.4, 30.0}}, {20, {0.5, 3.0}}, {50, {0.5, 11.0}},
        {100, {0.5, 20.0}}, {5, {0.6, 1.0}},   {100, {0.6, 5.0}},  {300, {0.6, 40.0}}, {1000, {0.6, 5.0}},
    };
    std::vector<std::size_t> violators;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& [n, s] = cases[i];
        const auto lo = nblab::lemma31_residual(n, s, 1000.0, table());
        const auto hi = nblab::lemma31_residual(n, s, 2000.0, table());
        EXPECT_TRUE(lo.pass) << n << " " << s;
        EXPECT_TRUE(hi.pass) << n << " " << s;
        EXPECT_LT(hi.truncation_estimate, lo.truncation_estimate);
        if (hi.residual > lo.residual + 1e-12)
            violators.push_back(i);
    }
    EXPECT_EQ(violators, std::vector<std::size_t>{8});
}

TEST(Lemma31, Errors)
{
    EXPECT_THROW((void)nblab::lemma31_residual(100, Complex(1.2, 5.0), 1000.0, table()), nblab::Error);
    EXPECT_THROW((void)nblab::lemma31_residual(100, Complex(0.6, 5.0), 5000.0, table()), nblab::Error);
    try {
        (void)nblab::lemma31_residual(100, table().records()[0].rho(), 1000.0, table());
        FAIL();
    } catch (const nblab::Error& e) {
        EXPECT_EQ(e.kind(), nblab::ErrorKind::SingularAtZero);
    }
}
