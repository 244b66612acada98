#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "zgap/amplifier.hpp"

using namespace zgap;

namespace {

// d_r by repeated Dirichlet convolution with 1.
std::vector<std::uint64_t> convolution_oracle(int r, std::uint64_t limit) {
    std::vector<std::uint64_t> d(limit + 1, 1);
    d[0] = 0;
    for (int k = 2; k <= r; ++k) {
        std::vector<std::uint64_t> next(limit + 1, 0);
        for (std::uint64_t a = 1; a <= limit; ++a)
            for (std::uint64_t m = a; m <= limit; m += a) next[m] += d[a];
        d = std::move(next);
    }
    return d;
}

}  // namespace

TEST(DivisorTable, SmallValues) {
    auto d1 = sieve_divisor_coeffs(1, 10);
    for (std::uint64_t n = 1; n <= 10; ++n) EXPECT_EQ(d1[n], 1u);
    EXPECT_EQ(sieve_divisor_coeffs(2, 6)[6], 4u);
    EXPECT_EQ(sieve_divisor_coeffs(3, 4)[4], 6u);
}

TEST(DivisorTable, MatchesConvolutionOracle) {
    for (int r = 1; r <= 4; ++r) {
        const auto oracle = convolution_oracle(r, 3000);
        const auto table = sieve_divisor_coeffs(r, 3000);
        for (std::uint64_t n = 1; n <= 3000; ++n) ASSERT_EQ(table[n], oracle[n]) << "r=" << r << " n=" << n;
    }
}

TEST(DivisorTable, Multiplicative) {
    const std::uint64_t limit = 10000;
    for (int r = 2; r <= 3; ++r) {
        const auto d = sieve_divisor_coeffs(r, limit);
        for (std::uint64_t m = 2; m <= limit; ++m)
            for (std::uint64_t n = 2; m * n <= limit; ++n)
                if (std::gcd(m, n) == 1) {
                    ASSERT_EQ(d[m * n], d[m] * d[n]) << m << "*" << n;
                }
    }
}

TEST(DivisorTable, PrimePowers) {
    const auto d = sieve_divisor_coeffs(4, 1 << 12);
    // binom(a + 3, 3)
    for (unsigned a = 0; a <= 12; ++a) EXPECT_EQ(d[1u << a], (a + 3) * (a + 2) * (a + 1) / 6) << a;
}

TEST(DivisorTable, RejectsBadInput) {
    EXPECT_THROW(sieve_divisor_coeffs(0, 10), std::invalid_argument);
    EXPECT_THROW(sieve_divisor_coeffs(2, 0), std::invalid_argument);
}

TEST(Primes, CountsUpTo) {
    EXPECT_EQ(primes_up_to(1).size(), 0u);
    EXPECT_EQ(primes_up_to(100).size(), 25u);
    EXPECT_EQ(primes_up_to(1000000).size(), 78498u);
}

TEST(Polynomial, EvaluationAndValidation) {
    AmplifierPolynomial P({1.0, -5.8, 6.4});
    EXPECT_EQ(P.degree(), 2);
    EXPECT_DOUBLE_EQ(P(0.0), 1.0);
    EXPECT_NEAR(P(1.0), 1.6, 1e-15);
    EXPECT_THROW(AmplifierPolynomial(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(AmplifierPolynomial({1.0, NAN}), std::invalid_argument);
}

TEST(PBracket, Cases) {
    AmplifierPolynomial P({1.0, -5.8, 6.4});
    const double y = 1e4;
    EXPECT_EQ(eval_p_bracket(P, 10000, y), 0.0);
    EXPECT_EQ(eval_p_bracket(P, 20000, y), 0.0);
    EXPECT_NEAR(eval_p_bracket(P, 1, y), P(1.0), 1e-15);
    EXPECT_NEAR(eval_p_bracket(P, 100, y), -0.3, 1e-14);
    EXPECT_THROW(eval_p_bracket(P, 0, y), std::invalid_argument);
    EXPECT_THROW(eval_p_bracket(P, 2, 1.0), std::invalid_argument);
}

TEST(Amplifier, ValueAtZeroIsCoefficientSum) {
    AmplifierPolynomial P({1.0, -5.8, 6.4});
    const auto table = sieve_divisor_coeffs(2, 500);
    double expected = 0.0;
    for (std::uint64_t h = 1; h < 500; ++h) expected += table[h] * eval_p_bracket(P, h, 500.0);
    const auto m = amplifier_value(table, P, 500.0, {0.0, 0.0});
    EXPECT_NEAR(m.real(), expected, 1e-9 * std::abs(expected));
    EXPECT_NEAR(m.imag(), 0.0, 1e-12);
    EXPECT_THROW(amplifier_value(sieve_divisor_coeffs(2, 100), P, 500.0, {0.5, 0.0}), std::invalid_argument);
}

TEST(ConstantA, ClosedForms) {
    EXPECT_NEAR(compute_A_r(1, 1000000), 1.0, 1e-12);
    EXPECT_NEAR(compute_A_r(2, 10000000), 6.0 / (std::numbers::pi * std::numbers::pi), 1e-8);
}

TEST(ConstantA, CauchyConvergence) {
    double prev = compute_A_r(3, 25000);
    double prev_change = INFINITY;
    for (std::uint64_t limit = 50000; limit <= 800000; limit *= 2) {
        const double cur = compute_A_r(3, limit);
        const double change = std::abs(cur - prev);
        EXPECT_LT(change, prev_change) << limit;
        prev_change = change;
        prev = cur;
    }
    EXPECT_LT(std::abs(compute_A_r(3, 100000) - compute_A_r(3, 1000000)), 5e-7);
}

TEST(ConstantA, SquareSumTrend) {
    const auto d = sieve_divisor_coeffs(2, 1000000);
    const double a2 = compute_A_r(2, 1000000);
    double sum = 0.0;
    std::uint64_t n = 1;
    std::vector<double> ratios;
    for (double x : {1e4, 1e5, 1e6}) {
        for (; n <= static_cast<std::uint64_t>(x); ++n) sum += static_cast<double>(d[n] * d[n]) / n;
        ratios.push_back(sum / (a2 * std::pow(std::log(x), 4) / 24.0));
    }
    EXPECT_GT(ratios[0], ratios[1]);
    EXPECT_GT(ratios[1], ratios[2]);
    EXPECT_GT(ratios[2], 1.0);
    EXPECT_LT(ratios[1] - ratios[2], ratios[0] - ratios[1]);
}

TEST(PartialSummation, HarmonicCase) {
    for (double y : {1e3, 1e4, 1e5}) {
        const auto rep = verify_lemma42(1, {0.0, 0.0}, y, {1.0});
        EXPECT_NEAR(rep.main_term.real(), std::log(y), 1e-12);
        EXPECT_NEAR(rep.residual.real(), std::numbers::egamma, 1.0 / y + 1e-12);
    }
}

TEST(PartialSummation, NormalizedResidualBounded) {
    std::vector<double> res;
    for (double y : {1e4, 1e5, 1e6}) res.push_back(verify_lemma42(2, {0.0, 0.0}, y, {0.0, 1.0}).normalized_residual);
    const double hi = *std::max_element(res.begin(), res.end());
    const double lo = *std::min_element(res.begin(), res.end());
    EXPECT_LT(hi, 2.0);
    EXPECT_LT(hi - lo, 0.1);
}

TEST(PartialSummation, ComplexShiftOrderOne) {
    for (double y : {1e4, 1e5, 1e6}) {
        const auto rep = verify_lemma42(1, {0.0, 1.0 / std::log(y)}, y, {1.0});
        EXPECT_LT(std::abs(rep.residual), 1.0) << y;
    }
}

TEST(PartialSummation, RejectsSmallY) { EXPECT_THROW(verify_lemma42(1, {0.0, 0.0}, 50.0, {1.0}), std::invalid_argument); }
