#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "zgap/wirtinger.hpp"

using namespace zgap;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Gauss-Legendre quadrature of |g|^2 over [a, b].
template <class G>
double quad_norm2(G&& g, double a, double b) {
    const auto rule = gl_nodes(32);
    const int panels = 16;
    const double w = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < rule.order; ++i) {
            const double t = a + w * (p + 0.5 * (rule.nodes[i] + 1.0));
            acc += 0.5 * w * rule.weights[i] * std::norm(g(t));
        }
    return acc;
}

}  // namespace

TEST(TestFunction, GramMatchesQuadrature) {
    CounterRng rng(CounterRng::stream_key(31, 0));
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 4.0 * rng.uniform() - 2.0, b = a + 0.5 + 3.0 * rng.uniform();
        std::vector<TestFunction::Term> terms;
        for (int k = 0; k < 4; ++k)
            terms.push_back({10.0 * rng.uniform() - 5.0, {rng.uniform() - 0.5, rng.uniform() - 0.5}});
        const TestFunction f(a, b, terms);
        EXPECT_NEAR(f.norm2(), quad_norm2([&](double t) { return f(t); }, a, b), 1e-12);
        EXPECT_NEAR(f.derivative_norm2(), quad_norm2([&](double t) { return f.derivative(t); }, a, b), 1e-11);
    }
}

TEST(TestFunction, RejectsBadInterval) {
    EXPECT_THROW(TestFunction(1.0, 1.0, {}), std::invalid_argument);
    EXPECT_THROW(TestFunction(0.0, 1.0, {{NAN, {1.0, 0.0}}}), std::invalid_argument);
}

TEST(Wirtinger, ExtremalsAttainEquality) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-3.0, 2.5}, std::pair{10.0, 10.01}}) {
        EXPECT_NEAR(check_wirtinger_i(wirtinger_extremal_i(a, b)).ratio, 1.0, 1e-10);
        EXPECT_NEAR(check_wirtinger_ii(wirtinger_extremal_ii(a, b)).ratio, 1.0, 1e-10);
    }
}

TEST(Wirtinger, ZeroFunction) {
    const TestFunction zero(0.0, 1.0, {});
    for (const auto& rep : {check_wirtinger_i(zero), check_wirtinger_ii(zero)}) {
        EXPECT_EQ(rep.lhs, 0.0);
        EXPECT_EQ(rep.rhs, 0.0);
        EXPECT_TRUE(rep.satisfied);
    }
}

TEST(Wirtinger, PreconditionViolations) {
    EXPECT_THROW(check_wirtinger_i(from_real_trig(0.0, 1.0, {{kPi, 1.0, 0.0}})), std::invalid_argument);
    EXPECT_THROW(check_wirtinger_ii(from_real_trig(0.0, 1.0, {{0.0, 2.0, 0.0}})), std::invalid_argument);
    EXPECT_THROW(check_wirtinger_ii(from_real_trig(0.0, 1.0, {{kPi, 0.0, 1.0}})), std::invalid_argument);
}

TEST(Wirtinger, Strictness) {
    const auto f = from_real_trig(0.0, 2.0, {{kPi / 2.0, 0.0, 1.0}, {kPi, 0.0, 0.3}});
    EXPECT_LT(check_wirtinger_i(f).ratio, 1.0 - 1e-3);
    const auto g = from_real_trig(0.0, 2.0, {{kPi, 1.0, 0.0}, {2.0 * kPi, 0.2, 0.0}});
    EXPECT_LT(check_wirtinger_ii(g).ratio, 1.0 - 1e-3);
}

TEST(Wirtinger, RandomAdmissibleFamilies) {
    CounterRng rng(CounterRng::stream_key(32, 0));
    for (int n = 0; n < 1000; ++n) {
        const double a = 10.0 * rng.uniform() - 5.0, b = a + 0.2 + 4.0 * rng.uniform();
        const auto ri = check_wirtinger_i(random_admissible_i(rng, a, b));
        const auto rii = check_wirtinger_ii(random_admissible_ii(rng, a, b));
        ASSERT_TRUE(ri.satisfied) << n;
        ASSERT_TRUE(rii.satisfied) << n;
        ASSERT_LE(ri.ratio, 1.0 + 1e-10);
        ASSERT_LE(rii.ratio, 1.0 + 1e-10);
        ASSERT_GE(ri.lhs, 0.0);
        ASSERT_GE(rii.rhs, 0.0);
    }
}

TEST(Wirtinger, AffineInvariance) {
    CounterRng rng(CounterRng::stream_key(33, 0));
    for (int n = 0; n < 100; ++n) {
        const double a = 10.0 * rng.uniform() - 5.0, b = a + 0.2 + 4.0 * rng.uniform();
        const auto f = random_admissible_i(rng, a, b);
        EXPECT_NEAR(check_wirtinger_i(f).ratio, check_wirtinger_i(f.rescaled_to_unit()).ratio, 1e-12);
        const auto g = random_admissible_ii(rng, a, b);
        EXPECT_NEAR(check_wirtinger_ii(g).ratio, check_wirtinger_ii(g.rescaled_to_unit()).ratio, 1e-12);
    }
}

TEST(Wirtinger, SuiteReport) {
    const auto rep = run_wirtinger_suite(200, 5);
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.random_i_total, 200);
    EXPECT_EQ(rep.random_ii_passed, 200);
    EXPECT_LE(rep.worst_ratio_i, 1.0 + 1e-10);
    EXPECT_LE(rep.worst_ratio_ii, 1.0 + 1e-10);
}
