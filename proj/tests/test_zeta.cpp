#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "zgap/meansquare.hpp"
#include "zgap/zeros.hpp"
#include "zgap/zeta.hpp"

using namespace zgap;

namespace {

// Reference values from an arbitrary-precision library.
constexpr double kFirstZeros[10] = {14.134725141734694, 21.022039638771555, 25.010857580145689, 30.424876125859513,
                                    32.935061587739190, 37.586178158825671, 40.918719012147495, 43.327073280914999,
                                    48.005150881167160, 49.773832477672302};

const ZeroOrdinates& zeros_to_12000() {
    static const ZeroOrdinates z = find_zeros(0.0, 12000.0);
    return z;
}

}  // namespace

TEST(LogGamma, RealAxisAndComplexReference) {
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 30.0, 170.0})
        EXPECT_NEAR(log_gamma({x, 0.0}).real(), std::lgamma(x), 1e-13 * std::max(1.0, std::abs(std::lgamma(x))));
    const auto a = log_gamma({0.25, 30.0});
    EXPECT_NEAR(a.real(), -47.055241933994316, 1e-12);
    EXPECT_NEAR(a.imag(), 71.643569596014940, 1e-12);
    const auto b = log_gamma({3.0, -2.0});
    EXPECT_NEAR(b.real(), -0.031639059373961190, 1e-13);
    EXPECT_NEAR(b.imag(), -2.0221931975013271, 1e-13);
    EXPECT_THROW(log_gamma({-1.0, 0.0}), std::invalid_argument);
}

TEST(Theta, Reference) {
    EXPECT_NEAR(rs_theta(1.0), -1.7675479528122904, 1e-12);
    EXPECT_NEAR(rs_theta(10.0), -3.0670743962898953, 1e-12);
    EXPECT_NEAR(rs_theta(50.0), 26.461366070161410, 1e-12);
    EXPECT_NEAR(rs_theta(100.0), 87.972165231787220, 1e-11);
    EXPECT_NEAR(rs_theta(1000.0), 2034.5464280380316, 1e-10);
}

TEST(Zeta, EulerMaclaurinValues) {
    EXPECT_NEAR(std::abs(zeta_em({2.0, 0.0}) - std::numbers::pi * std::numbers::pi / 6.0), 0.0, 1e-14);
    EXPECT_NEAR(zeta_half(0.0).real(), -1.4603545088095868, 1e-13);
    EXPECT_THROW(zeta_em({1.0, 0.0}), std::invalid_argument);
}

TEST(Zeta, HardyZReference) {
    struct Ref {
        double t, z, tol;
    };
    // Riemann-Siegel truncation error falls off with height.
    const Ref ref[] = {{5.0, -0.73886342827526476, 1e-10},   {20.0, 1.1478424121851973, 1e-10},
                       {45.0, -3.2562892040795740, 1e-10},   {55.0, 2.8032775129841957, 1e-6},
                       {100.0, 2.6926970566644635, 1e-6},    {1000.0, 0.99779463752158661, 1e-8},
                       {10000.0, -0.34139472423120856, 1e-8}};
    for (const auto& r : ref) EXPECT_NEAR(hardy_Z(r.t), r.z, r.tol) << r.t;
}

TEST(Zeta, DualMethodOverlap) {
    double worst = 0.0;
    for (double t = 40.0; t <= 60.0; t += 0.05) {
        const std::complex<double> em = zeta_em({0.5, t});
        const std::complex<double> rs = hardy_Z_rs(t) * std::polar(1.0, -rs_theta(t));
        worst = std::max(worst, std::abs(em - rs));
        EXPECT_LT(std::abs(hardy_Z_im_residual(t)), 1e-10);
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(Zeros, FirstTen) {
    const auto z = find_zeros(0.0, 50.0);
    ASSERT_EQ(z.ordinates.size(), 10u);
    for (int k = 0; k < 10; ++k) EXPECT_NEAR(z.ordinates[k], kFirstZeros[k], 1e-8) << k;
    EXPECT_NEAR(z.ordinates[0], 14.1347251, 1e-6);
    EXPECT_EQ(z.method, "euler_maclaurin");
    EXPECT_TRUE(find_zeros(0.0, 10.0).ordinates.empty());
}

TEST(Zeros, SignChangeAtEveryOrdinate) {
    ZeroSearchOptions opt;
    opt.tolerance = 1e-8;
    const auto z = find_zeros(100.0, 2000.0, opt);
    EXPECT_EQ(z.method, "riemann_siegel");
    EXPECT_TRUE(z.anomalies.empty());
    for (std::size_t k = 0; k < z.ordinates.size(); ++k) {
        const double g = z.ordinates[k];
        ASSERT_LT(hardy_Z(g - opt.tolerance) * hardy_Z(g + opt.tolerance), 0.0) << g;
        if (k > 0) {
            ASSERT_GT(g, z.ordinates[k - 1]);
        }
    }
}

TEST(Zeros, CountsMatchReference) {
    const auto& z = zeros_to_12000();
    EXPECT_TRUE(z.anomalies.empty());
    EXPECT_EQ(count_check(z, 1000.0).counted, 649u);
    EXPECT_EQ(count_check(z, 10000.0).counted, 10142u);
    EXPECT_EQ(count_check(z, 10.0).counted, 0u);
    for (double T = 20.0; T <= 12000.0; T += 37.0) EXPECT_LE(std::abs(count_check(z, T).discrepancy), 5.0) << T;
    EXPECT_THROW(count_check(z, 5.0), std::invalid_argument);
    EXPECT_THROW(count_check(z, 20000.0), std::invalid_argument);
}

TEST(Zeros, ThreadInvariant) {
    ZeroSearchOptions serial, parallel;
    parallel.threads = 3;
    EXPECT_EQ(find_zeros(1000.0, 3000.0, serial).ordinates, find_zeros(1000.0, 3000.0, parallel).ordinates);
}

TEST(Zeros, RejectsBadRange) {
    EXPECT_THROW(find_zeros(-1.0, 10.0), std::invalid_argument);
    EXPECT_THROW(find_zeros(10.0, 10.0), std::invalid_argument);
    ZeroSearchOptions opt;
    opt.tolerance = 1e-12;
    EXPECT_THROW(find_zeros(0.0, 10.0, opt), std::invalid_argument);
}

TEST(Gaps, SinglePair) {
    const auto s = gap_stats(std::vector<double>{100.0, 101.5});
    ASSERT_EQ(s.normalized_gaps.size(), 1u);
    const double expected = 1.5 * std::log(100.0 / (2.0 * std::numbers::pi)) / (2.0 * std::numbers::pi);
    EXPECT_NEAR(s.normalized_gaps[0], expected, 1e-15);
    EXPECT_DOUBLE_EQ(s.mean, expected);
    EXPECT_DOUBLE_EQ(s.max, expected);
    EXPECT_DOUBLE_EQ(s.max_height, 100.0);
    EXPECT_THROW(gap_stats(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Gaps, WindowMeanNearOne) {
    const auto& z = zeros_to_12000();
    const auto window = ordinates_between(z, 0.0, 12000.0);
    ASSERT_GE(window.size(), 10000u);
    const auto s = gap_stats(window, 0.1);
    EXPECT_GE(s.mean, 0.9);
    EXPECT_LE(s.mean, 1.1);
    std::uint64_t total = 0;
    for (auto c : s.histogram.counts) total += c;
    EXPECT_EQ(total, s.normalized_gaps.size());
    for (double g : s.normalized_gaps) EXPECT_GT(g, 0.0);
}

TEST(Cache, RoundTrip) {
    const std::vector<double> ord{14.134725141734694, 21.022039638771555, 1e5 + 1.0 / 3.0};
    std::stringstream ss;
    write_zero_cache(ss, ord);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 8u * ord.size());
    EXPECT_EQ(bytes.substr(0, 4), "ZGZ1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u);
    std::stringstream in(bytes);
    EXPECT_EQ(read_zero_cache(in), ord);
}

TEST(Cache, RejectsCorruptInput) {
    std::stringstream ss;
    write_zero_cache(ss, {1.0, 2.0});
    std::string bytes = ss.str();

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::stringstream a(bad_magic);
    EXPECT_THROW(read_zero_cache(a), std::runtime_error);

    std::string bad_version = bytes;
    bad_version[4] = 2;
    std::stringstream b(bad_version);
    EXPECT_THROW(read_zero_cache(b), std::runtime_error);

    std::stringstream c(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_zero_cache(c), std::runtime_error);

    std::stringstream d;
    write_zero_cache(d, {2.0, 1.0});
    EXPECT_THROW(read_zero_cache(d), std::runtime_error);
}

TEST(Csv, HeaderAndRows) {
    std::ostringstream os;
    write_gap_csv(os, {100.0, 101.5, 103.0});
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "n,gamma,gap,normalized_gap");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 2);
}

TEST(MeanSquare, ZeroPolynomialAndRange) {
    MeanSquareOptions opt;
    opt.coverage = 0.01;
    opt.windows = 4;
    opt.cj.order = 4;
    opt.prime_limit = 1000;
    const auto rep = direct_meansquare(1e4, CjParams{}, AmplifierPolynomial({0.0}), opt);
    EXPECT_EQ(rep.direct, 0.0);
    EXPECT_LE(rep.step, std::numbers::pi / (8.0 * rep.L));
    EXPECT_THROW(direct_meansquare(1e3, CjParams{}, AmplifierPolynomial({1.0}), opt), std::invalid_argument);
    EXPECT_THROW(direct_meansquare(2e6, CjParams{}, AmplifierPolynomial({1.0}), opt), std::invalid_argument);
    CjParams p;
    p.j = 1;
    EXPECT_THROW(direct_meansquare(1e4, p, AmplifierPolynomial({1.0}), opt), std::invalid_argument);
}

TEST(MeanSquare, MainTermFormula) {
    const double T = 1e5, c0 = 1.3e-5, A = 0.05;
    const double L = std::log(T / (2.0 * std::numbers::pi));
    EXPECT_NEAR(meansquare_main_term(c0, A, T, 0.25, 1), c0 * A * std::pow(0.25 * std::log(T), 5) * std::pow(L, 4) * T / 2.0,
                1e-12 * meansquare_main_term(c0, A, T, 0.25, 1));
}

TEST(MeanSquare, SampledCoverageIsStable) {
    MeanSquareOptions a;
    a.coverage = 0.02;
    a.windows = 16;
    a.cj.order = 6;
    a.prime_limit = 10000;
    MeanSquareOptions b = a;
    b.threads = 2;
    const AmplifierPolynomial P({1.0, -5.8, 6.4});
    const auto ra = direct_meansquare(1e4, CjParams{}, P, a);
    const auto rb = direct_meansquare(1e4, CjParams{}, P, b);
    EXPECT_EQ(ra.direct, rb.direct);
    EXPECT_GT(ra.direct, 0.0);
    EXPECT_GT(ra.predicted, 0.0);
}
